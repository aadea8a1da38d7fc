//! Nonclassical light in disordered coupled-waveguide arrays: Green-function
//! propagation, disorder ensembles, photon statistics and output-mode Wigner
//! functions.

pub mod archive;
pub mod config;
pub mod disorder;
pub mod ensemble;
pub mod error;
pub mod experiment;
pub mod lattice;
pub mod observables;
pub mod oracle_check;
pub mod output;
pub mod parallel;
pub mod phase_space;
pub mod special;
pub mod states;
pub mod tridiag;

pub use archive::RealizationArchive;
pub use config::ExperimentConfig;
pub use disorder::{derive_seed, sample_betas, DisorderSpec};
pub use ensemble::{run_ensemble, ArchiveCapture, EnsembleRequest, EnsembleRun, LatticeGeometry};
pub use error::{Error, Result};
pub use experiment::{run_experiment, simulate, summarize, wigner_pipeline};
pub use lattice::{ordered_lattice_oracle, propagate_green, GreenTrajectory, LatticeConfig};
pub use observables::EnsembleStats;
pub use parallel::Execution;
pub use phase_space::{number_state_wigner, pnd, wigner_grid, wigner_point, GreenSample, GridSpec, WignerGrid};
pub use states::{FockVector, StateMoments, StateSpec};
