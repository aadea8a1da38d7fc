//! Experiment configuration, read from TOML.
//!
//! ```toml
//! format_version = 1
//! experiment = "localization"
//! delta_over_c = [0.0, 1.5, 5.0]
//! z_checkpoints = [5.0, 20.0]
//! realizations = 1000
//! master_seed = 2024
//! input_states = ["ccs:0.1414,10", "rbs:0,20", "coherent:10"]
//! output_dir = "out"            # falls back to $AWG_OUTPUT_DIR, then "."
//! execution = "parallel"        # or "sequential"
//!
//! [lattice]
//! guide_count = 101
//! injection_index = 51
//! coupling = 1.0
//! dz = 0.001
//!
//! [capture]
//! cross_correlations = false
//! archive = "none"              # "injection" or "full-row"
//! gnuplot = false
//! ```
//!
//! Every key is optional.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::ensemble::{ArchiveCapture, LatticeGeometry};
use crate::error::{Error, Result};
use crate::lattice::validate_checkpoints;
use crate::parallel::Execution;
use crate::states::StateSpec;

pub const FORMAT_VERSION: u32 = 1;

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "AWG_OUTPUT_DIR";

pub const DEFAULT_REALIZATIONS: u64 = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CaptureFlags {
    /// Keep the full ⟨|G_j|²|G_l|²⟩ matrices (O(M²) per checkpoint).
    pub cross_correlations: bool,
    pub archive: ArchiveCapture,
    pub gnuplot: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub format_version: u32,
    pub experiment: String,
    pub lattice: LatticeGeometry,
    pub delta_over_c: Vec<f64>,
    pub z_checkpoints: Vec<f64>,
    pub realizations: u64,
    /// TOML integers stop at 2^63 − 1, so larger seeds may be given as strings.
    #[serde(deserialize_with = "seed_from_int_or_str")]
    pub master_seed: u64,
    pub input_states: Vec<StateSpec>,
    pub output_dir: Option<PathBuf>,
    pub capture: CaptureFlags,
    pub execution: Execution,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            format_version: FORMAT_VERSION,
            experiment: "experiment".into(),
            lattice: LatticeGeometry::default(),
            delta_over_c: vec![0.0, 1.5, 5.0],
            z_checkpoints: (1..=20).map(f64::from).collect(),
            realizations: DEFAULT_REALIZATIONS,
            master_seed: 0,
            input_states: StateSpec::reference_set().iter().map(|(_, s)| *s).collect(),
            output_dir: None,
            capture: CaptureFlags::default(),
            execution: Execution::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::config("config", e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::config(
                "format_version",
                format!("unsupported version {} (expected {FORMAT_VERSION})", self.format_version),
            ));
        }
        if self.experiment.is_empty()
            || !self
                .experiment
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
        {
            return Err(Error::config("experiment", "use letters, digits, '-' or '_'"));
        }
        let g = &self.lattice;
        if g.guide_count < 3 {
            return Err(Error::config("lattice.guide_count", "need at least 3 guides"));
        }
        if g.injection_index < 1 || g.injection_index > g.guide_count {
            return Err(Error::config(
                "lattice.injection_index",
                format!("must lie in [1, {}]", g.guide_count),
            ));
        }
        if !g.coupling.is_finite() {
            return Err(Error::config("lattice.coupling", "must be finite"));
        }
        if !(g.dz > 0.0 && g.dz.is_finite()) {
            return Err(Error::config("lattice.dz", "must be positive and finite"));
        }
        if self.delta_over_c.is_empty() {
            return Err(Error::config("delta_over_c", "list is empty"));
        }
        if let Some(d) = self.delta_over_c.iter().find(|d| !(d.is_finite() && **d >= 0.0)) {
            return Err(Error::config("delta_over_c", format!("{d} is not a finite nonnegative value")));
        }
        if self.z_checkpoints.is_empty() {
            return Err(Error::config("z_checkpoints", "list is empty"));
        }
        validate_checkpoints(&self.z_checkpoints)?;
        if self.realizations == 0 {
            return Err(Error::config("realizations", "must be at least 1"));
        }
        Ok(())
    }

    /// Configured directory, else `$AWG_OUTPUT_DIR`, else the working directory.
    pub fn resolved_output_dir(&self) -> PathBuf {
        self.output_dir
            .clone()
            .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("."))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serialises")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::config("config", e.to_string()))
    }
}

fn seed_from_int_or_str<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<u64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Seed {
        Int(u64),
        Str(String),
    }
    match Seed::deserialize(d)? {
        Seed::Int(v) => Ok(v),
        Seed::Str(s) => s.trim().parse().map_err(serde::de::Error::custom),
    }
}
