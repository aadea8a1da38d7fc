//! Disorder ensembles: draw, propagate and reduce R realizations at one Δ/C.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::disorder::{derive_seed, sample_betas, DisorderSpec};
use crate::error::{Error, Result};
use crate::lattice::{propagate_green, GreenTrajectory, LatticeConfig};
use crate::observables::EnsembleStats;
use crate::parallel::{map_indexed, Execution};

/// |Σ_j |G_j|² − 1| above this aborts the run.
pub const NORM_TOLERANCE: f64 = 1e-8;

/// Realizations propagated per parallel batch; bounds the memory held by
/// trajectories waiting for the ordered reduction.
const BATCH: usize = 64;

/// What to keep of each realization besides the running means.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ArchiveCapture {
    #[default]
    None,
    /// G_{j0,j0}(z) only.
    Injection,
    /// The whole row G_{·,j0}(z).
    FullRow,
}

impl ArchiveCapture {
    pub fn as_str(self) -> &'static str {
        match self {
            ArchiveCapture::None => "none",
            ArchiveCapture::Injection => "injection",
            ArchiveCapture::FullRow => "full-row",
        }
    }
}

impl std::str::FromStr for ArchiveCapture {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Self::None),
            "injection" => Ok(Self::Injection),
            "full-row" => Ok(Self::FullRow),
            other => Err(Error::config(
                "capture.archive",
                format!("`{other}` is not one of none, injection, full-row"),
            )),
        }
    }
}

/// Lattice geometry shared by every realization of an ensemble.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LatticeGeometry {
    pub guide_count: usize,
    pub injection_index: usize,
    pub coupling: f64,
    pub dz: f64,
}

impl Default for LatticeGeometry {
    fn default() -> Self {
        Self {
            guide_count: LatticeConfig::DEFAULT_GUIDES,
            injection_index: LatticeConfig::DEFAULT_INJECTION,
            coupling: LatticeConfig::DEFAULT_COUPLING,
            dz: LatticeConfig::DEFAULT_DZ,
        }
    }
}

/// Amplitudes kept for one (realization, checkpoint).
#[derive(Debug, Clone, PartialEq)]
pub struct RealizationRecord {
    pub realization_index: u64,
    pub delta_over_c: f64,
    pub z: f64,
    pub values: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleRun {
    pub delta_over_c: f64,
    pub stats: EnsembleStats,
    /// Ordered by realization, then checkpoint.
    pub records: Vec<RealizationRecord>,
    /// Largest |Σ_j |G_j|² − 1| seen over all realizations and checkpoints.
    pub max_norm_error: f64,
}

/// Seed of the stream that feeds realization `r` at disorder `delta_over_c`.
/// Each Δ/C gets its own family of streams.
pub fn ensemble_master_seed(master_seed: u64, delta_over_c: f64) -> u64 {
    derive_seed(master_seed, delta_over_c.to_bits())
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleRequest<'a> {
    pub geometry: &'a LatticeGeometry,
    pub z_checkpoints: &'a [f64],
    pub delta_over_c: f64,
    pub realizations: u64,
    pub master_seed: u64,
    pub capture_cross: bool,
    pub archive: ArchiveCapture,
    pub execution: Execution,
}

impl EnsembleRequest<'_> {
    /// Lattice of realization `r` (β drawn from its own stream).
    pub fn lattice(&self, r: u64) -> Result<LatticeConfig> {
        let g = self.geometry;
        let betas = sample_betas(&DisorderSpec {
            delta: self.delta_over_c * g.coupling.abs(),
            guide_count: g.guide_count,
            master_seed: ensemble_master_seed(self.master_seed, self.delta_over_c),
            realization_index: r,
        })
        .map_err(|_| Error::config("delta_over_c", format!("{} is not a valid disorder strength", self.delta_over_c)))?;
        Ok(LatticeConfig {
            guide_count: g.guide_count,
            injection_index: g.injection_index,
            coupling: g.coupling,
            dz: g.dz,
            z_checkpoints: self.z_checkpoints.to_vec(),
            betas,
        })
    }

    pub fn trajectory(&self, r: u64) -> Result<GreenTrajectory> {
        propagate_green(&self.lattice(r)?)
    }
}

/// Propagate every realization and reduce them in index order.
///
/// The result does not depend on `execution`: trajectories are produced in
/// batches, collected by index, and folded sequentially.
pub fn run_ensemble(req: &EnsembleRequest<'_>) -> Result<EnsembleRun> {
    if req.realizations == 0 {
        return Err(Error::config("realizations", "must be at least 1"));
    }
    let mut stats = EnsembleStats::new(
        req.z_checkpoints.to_vec(),
        req.geometry.guide_count,
        req.geometry.injection_index,
        req.capture_cross,
    );
    let mut records = Vec::new();
    let mut max_norm_error: f64 = 0.0;
    let j0 = req.geometry.injection_index - 1;

    let mut start = 0u64;
    while start < req.realizations {
        let len = (req.realizations - start).min(BATCH as u64) as usize;
        let batch = map_indexed(req.execution, len, |i| req.trajectory(start + i as u64));
        for (i, trajectory) in batch.into_iter().enumerate() {
            let trajectory = trajectory?;
            let r = start + i as u64;
            for (k, &z) in trajectory.checkpoints.iter().enumerate() {
                let err = (trajectory.norm_sqr(k) - 1.0).abs();
                if err.is_nan() || err > NORM_TOLERANCE {
                    return Err(Error::Numerical(format!(
                        "norm drift {err:e} at Δ/C = {}, realization {r}, z = {z}",
                        req.delta_over_c
                    )));
                }
                max_norm_error = max_norm_error.max(err);
                let values = match req.archive {
                    ArchiveCapture::None => continue,
                    ArchiveCapture::Injection => vec![trajectory.rows[k][j0]],
                    ArchiveCapture::FullRow => trajectory.rows[k].clone(),
                };
                records.push(RealizationRecord {
                    realization_index: r,
                    delta_over_c: req.delta_over_c,
                    z,
                    values,
                });
            }
            stats.accumulate(&trajectory)?;
        }
        start += len as u64;
    }

    Ok(EnsembleRun {
        delta_over_c: req.delta_over_c,
        stats,
        records,
        max_norm_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geometry() -> LatticeGeometry {
        LatticeGeometry {
            guide_count: 15,
            injection_index: 8,
            coupling: 1.0,
            dz: 0.01,
        }
    }

    fn request<'a>(geo: &'a LatticeGeometry, z: &'a [f64], delta: f64, exec: Execution) -> EnsembleRequest<'a> {
        EnsembleRequest {
            geometry: geo,
            z_checkpoints: z,
            delta_over_c: delta,
            realizations: 70,
            master_seed: 11,
            capture_cross: false,
            archive: ArchiveCapture::Injection,
            execution: exec,
        }
    }

    #[test]
    fn execution_mode_does_not_change_results() {
        let geo = geometry();
        let z = [0.5, 1.5];
        let seq = run_ensemble(&request(&geo, &z, 1.0, Execution::Sequential)).unwrap();
        let par = run_ensemble(&request(&geo, &z, 1.0, Execution::Parallel)).unwrap();
        assert_eq!(seq, par);
        assert_eq!(seq.records.len(), 140);
        assert_eq!(seq.stats.realization_count, 70);
    }

    #[test]
    fn ordered_ensemble_has_zero_spread() {
        let geo = geometry();
        let z = [1.0];
        let run = run_ensemble(&request(&geo, &z, 0.0, Execution::Parallel)).unwrap();
        let first = &run.records[0].values;
        assert!(run.records.iter().all(|r| &r.values == first));
        assert_eq!(run.stats.sem_abs2(8, 0).unwrap(), Some(0.0));
    }

    #[test]
    fn streams_differ_between_disorder_strengths() {
        let geo = geometry();
        let a = request(&geo, &[1.0], 1.0, Execution::Sequential).lattice(0).unwrap();
        let b = request(&geo, &[1.0], 2.0, Execution::Sequential).lattice(0).unwrap();
        let ratio: Vec<f64> = a.betas.iter().zip(&b.betas).map(|(x, y)| y / x).collect();
        assert!(ratio.iter().any(|r| (r - 2.0).abs() > 1e-6));
    }

    #[test]
    fn zero_realizations_is_a_config_error() {
        let geo = geometry();
        let mut req = request(&geo, &[1.0], 1.0, Execution::Sequential);
        req.realizations = 0;
        assert_eq!(run_ensemble(&req).unwrap_err().exit_code(), 1);
    }
}
