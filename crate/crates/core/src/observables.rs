//! Disorder-averaged Green's-function statistics and the observables built
//! from them.
//!
//! With light injected into a single guide every observable splits into a
//! medium factor (a disorder average of |G|², |G|⁴, …) and an input factor
//! (⟨a†a⟩ or ⟨a†²a²⟩), so one ensemble serves every input state.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::GreenTrajectory;
use crate::states::StateMoments;

/// Running statistics for one checkpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckpointStats {
    /// ⟨|G_{j,j0}|²⟩
    pub mean_abs2: Vec<f64>,
    /// ⟨|G_{j,j0}|⁴⟩
    pub mean_abs4: Vec<f64>,
    /// Row-major M×M matrix ⟨|G_j|²|G_l|²⟩, present only when requested.
    pub mean_cross: Option<Vec<f64>>,
    // Welford accumulators for the error bars
    sq_dev_abs2: Vec<f64>,
    sq_dev_abs4: Vec<f64>,
    co_dev: Vec<f64>,
}

impl CheckpointStats {
    fn new(m: usize, capture_cross: bool) -> Self {
        Self {
            mean_abs2: vec![0.0; m],
            mean_abs4: vec![0.0; m],
            mean_cross: capture_cross.then(|| vec![0.0; m * m]),
            sq_dev_abs2: vec![0.0; m],
            sq_dev_abs4: vec![0.0; m],
            co_dev: vec![0.0; m],
        }
    }
}

/// Streaming means over realizations of ⟨|G|²⟩, ⟨|G|⁴⟩ and optionally
/// ⟨|G_j|²|G_l|²⟩, per checkpoint.
///
/// Means are updated incrementally (mean += (x − mean)/n), so feeding the same
/// row repeatedly leaves every mean bit-identical to a single feed.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleStats {
    pub checkpoints: Vec<f64>,
    pub guide_count: usize,
    pub injection_index: usize,
    pub realization_count: u64,
    pub per_checkpoint: Vec<CheckpointStats>,
}

impl EnsembleStats {
    pub fn new(
        checkpoints: Vec<f64>,
        guide_count: usize,
        injection_index: usize,
        capture_cross: bool,
    ) -> Self {
        let per_checkpoint = checkpoints
            .iter()
            .map(|_| CheckpointStats::new(guide_count, capture_cross))
            .collect();
        Self {
            checkpoints,
            guide_count,
            injection_index,
            realization_count: 0,
            per_checkpoint,
        }
    }

    /// Empty statistics shaped like `trajectory`.
    pub fn for_trajectory(trajectory: &GreenTrajectory, capture_cross: bool) -> Self {
        Self::new(
            trajectory.checkpoints.clone(),
            trajectory.guide_count(),
            trajectory.injection_index,
            capture_cross,
        )
    }

    pub fn captures_cross(&self) -> bool {
        self.per_checkpoint
            .first()
            .is_some_and(|c| c.mean_cross.is_some())
    }

    /// Fold one realization into the running means.
    pub fn accumulate(&mut self, trajectory: &GreenTrajectory) -> Result<()> {
        if trajectory.checkpoints != self.checkpoints {
            return Err(Error::Mismatch(format!(
                "trajectory checkpoints {:?} differ from ensemble checkpoints {:?}",
                trajectory.checkpoints, self.checkpoints
            )));
        }
        if trajectory.guide_count() != self.guide_count
            || trajectory.injection_index != self.injection_index
        {
            return Err(Error::Mismatch(format!(
                "trajectory has M={}, j0={}; ensemble has M={}, j0={}",
                trajectory.guide_count(),
                trajectory.injection_index,
                self.guide_count,
                self.injection_index
            )));
        }
        self.realization_count += 1;
        let n = self.realization_count as f64;
        let m = self.guide_count;
        let mut abs2 = vec![0.0; m];
        for (stats, row) in self.per_checkpoint.iter_mut().zip(&trajectory.rows) {
            for (a, g) in abs2.iter_mut().zip(row) {
                *a = g.norm_sqr();
            }
            for j in 0..m {
                let x = abs2[j];
                let y = x * x;
                let dx = x - stats.mean_abs2[j];
                stats.mean_abs2[j] += dx / n;
                let dy = y - stats.mean_abs4[j];
                stats.mean_abs4[j] += dy / n;
                stats.sq_dev_abs2[j] += dx * (x - stats.mean_abs2[j]);
                stats.sq_dev_abs4[j] += dy * (y - stats.mean_abs4[j]);
                stats.co_dev[j] += dx * (y - stats.mean_abs4[j]);
            }
            if let Some(cross) = stats.mean_cross.as_mut() {
                for j in 0..m {
                    for l in 0..m {
                        let v = &mut cross[j * m + l];
                        *v += (abs2[j] * abs2[l] - *v) / n;
                    }
                }
            }
        }
        Ok(())
    }

    fn checkpoint(&self, z_idx: usize) -> Result<&CheckpointStats> {
        self.per_checkpoint.get(z_idx).ok_or(Error::OutOfRange {
            index: z_idx,
            len: self.per_checkpoint.len(),
        })
    }

    /// 1-based guide index → 0-based slot.
    fn slot(&self, guide: usize) -> Result<usize> {
        if guide == 0 || guide > self.guide_count {
            return Err(Error::OutOfRange {
                index: guide,
                len: self.guide_count,
            });
        }
        Ok(guide - 1)
    }

    pub fn mean_abs2(&self, guide: usize, z_idx: usize) -> Result<f64> {
        Ok(self.checkpoint(z_idx)?.mean_abs2[self.slot(guide)?])
    }

    pub fn mean_abs4(&self, guide: usize, z_idx: usize) -> Result<f64> {
        Ok(self.checkpoint(z_idx)?.mean_abs4[self.slot(guide)?])
    }

    pub fn mean_cross(&self, j: usize, l: usize, z_idx: usize) -> Result<f64> {
        let stats = self.checkpoint(z_idx)?;
        let (sj, sl) = (self.slot(j)?, self.slot(l)?);
        if sj == sl {
            return Ok(stats.mean_abs4[sj]);
        }
        stats
            .mean_cross
            .as_ref()
            .map(|c| c[sj * self.guide_count + sl])
            .ok_or(Error::CrossNotCaptured(j, l))
    }

    fn sample_variance(&self, acc: f64) -> Option<f64> {
        (self.realization_count >= 2).then(|| acc / (self.realization_count - 1) as f64)
    }

    /// Standard error of ⟨|G|²⟩; `None` with fewer than two realizations.
    pub fn sem_abs2(&self, guide: usize, z_idx: usize) -> Result<Option<f64>> {
        let acc = self.checkpoint(z_idx)?.sq_dev_abs2[self.slot(guide)?];
        let n = self.realization_count as f64;
        Ok(self.sample_variance(acc).map(|v| (v / n).sqrt()))
    }

    /// Standard error of ⟨|G|⁴⟩.
    pub fn sem_abs4(&self, guide: usize, z_idx: usize) -> Result<Option<f64>> {
        let acc = self.checkpoint(z_idx)?.sq_dev_abs4[self.slot(guide)?];
        let n = self.realization_count as f64;
        Ok(self.sample_variance(acc).map(|v| (v / n).sqrt()))
    }

    /// Delta-method standard error of the medium factor ⟨|G|⁴⟩/⟨|G|²⟩².
    pub fn sem_medium_factor(&self, guide: usize, z_idx: usize) -> Result<Option<f64>> {
        let stats = self.checkpoint(z_idx)?;
        let j = self.slot(guide)?;
        let (m2, m4) = (stats.mean_abs2[j], stats.mean_abs4[j]);
        if m2 == 0.0 {
            return Ok(None);
        }
        let (Some(v2), Some(v4), Some(c24)) = (
            self.sample_variance(stats.sq_dev_abs2[j]),
            self.sample_variance(stats.sq_dev_abs4[j]),
            self.sample_variance(stats.co_dev[j]),
        ) else {
            return Ok(None);
        };
        let d4 = 1.0 / (m2 * m2);
        let d2 = -2.0 * m4 / (m2 * m2 * m2);
        let var = d4 * d4 * v4 + d2 * d2 * v2 + 2.0 * d2 * d4 * c24;
        Ok(Some((var.max(0.0) / self.realization_count as f64).sqrt()))
    }
}

/// ⟨I_j(z)⟩ = ⟨|G_{j,j0}|²⟩ ⟨a†a⟩.
pub fn mean_intensity(
    stats: &EnsembleStats,
    moments: &StateMoments,
    guide: usize,
    z_idx: usize,
) -> Result<f64> {
    Ok(stats.mean_abs2(guide, z_idx)? * moments.mean_n)
}

/// ⟨I_j I_l⟩ = ⟨|G_j|²|G_l|²⟩ ⟨a†²a²⟩. Off-diagonal pairs need cross capture.
pub fn intensity_correlation(
    stats: &EnsembleStats,
    moments: &StateMoments,
    j: usize,
    l: usize,
    z_idx: usize,
) -> Result<f64> {
    Ok(stats.mean_cross(j, l, z_idx)? * moments.mean_n2fact)
}

/// g² split into its medium and input factors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct G2Factors {
    /// ⟨|G|⁴⟩/⟨|G|²⟩²
    pub medium: f64,
    /// ⟨a†²a²⟩/⟨a†a⟩²
    pub input: f64,
    pub total: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum G2Outcome {
    Value(G2Factors),
    /// ⟨|G|²⟩ or ⟨a†a⟩ vanishes: g² is undefined at this guide.
    NoSignal,
}

impl G2Outcome {
    pub fn value(&self) -> Option<G2Factors> {
        match self {
            G2Outcome::Value(f) => Some(*f),
            G2Outcome::NoSignal => None,
        }
    }
}

/// Second-order correlation of guide `guide` at checkpoint `z_idx`.
pub fn g2(
    stats: &EnsembleStats,
    moments: &StateMoments,
    guide: usize,
    z_idx: usize,
) -> Result<G2Outcome> {
    let m2 = stats.mean_abs2(guide, z_idx)?;
    let m4 = stats.mean_abs4(guide, z_idx)?;
    let Some(input) = moments.g2() else {
        return Ok(G2Outcome::NoSignal);
    };
    if m2 == 0.0 {
        return Ok(G2Outcome::NoSignal);
    }
    let medium = m4 / (m2 * m2);
    Ok(G2Outcome::Value(G2Factors {
        medium,
        input,
        total: medium * input,
    }))
}

/// (ΔI)² of the injection guide:
/// ⟨|G|⁴⟩⟨a†²a²⟩ + ⟨|G|²⟩⟨a†a⟩ − ⟨|G|²⟩²⟨a†a⟩².
pub fn intensity_variance(stats: &EnsembleStats, moments: &StateMoments, z_idx: usize) -> Result<f64> {
    intensity_variance_at(stats, moments, stats.injection_index, z_idx)
}

/// The same expansion for an arbitrary guide.
pub fn intensity_variance_at(
    stats: &EnsembleStats,
    moments: &StateMoments,
    guide: usize,
    z_idx: usize,
) -> Result<f64> {
    let m2 = stats.mean_abs2(guide, z_idx)?;
    let m4 = stats.mean_abs4(guide, z_idx)?;
    let n = moments.mean_n;
    Ok(m4 * moments.mean_n2fact + m2 * n - m2 * m2 * n * n)
}

/// (Σ_j ⟨n_j⟩)² / Σ_j ⟨n_j⟩², independent of the input state.
pub fn participation_number(stats: &EnsembleStats, z_idx: usize) -> Result<f64> {
    let row = &stats.checkpoint(z_idx)?.mean_abs2;
    let sum: f64 = row.iter().sum();
    let sum_sq: f64 = row.iter().map(|v| v * v).sum();
    Ok(sum * sum / sum_sq)
}

#[cfg(test)]
mod tests {
    use num_complex::Complex64;

    use super::*;
    use crate::lattice::{propagate_green, LatticeConfig};
    use crate::states::StateSpec;

    fn synthetic(rows: Vec<Vec<Complex64>>, checkpoints: Vec<f64>) -> GreenTrajectory {
        GreenTrajectory {
            injection_index: 2,
            checkpoints,
            rows,
        }
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn single_realization_means_are_the_row() {
        let row = vec![c(0.6, 0.0), c(0.0, 0.64), c(0.48, 0.0)];
        let t = synthetic(vec![row.clone()], vec![1.0]);
        let mut s = EnsembleStats::for_trajectory(&t, true);
        s.accumulate(&t).unwrap();
        for (j, g) in row.iter().enumerate() {
            assert_eq!(s.mean_abs2(j + 1, 0).unwrap(), g.norm_sqr());
            assert_eq!(s.mean_abs4(j + 1, 0).unwrap(), g.norm_sqr() * g.norm_sqr());
        }
        assert_eq!(s.sem_abs2(1, 0).unwrap(), None);
        let once = s.clone();
        s.accumulate(&t).unwrap();
        assert_eq!(once.per_checkpoint[0].mean_abs2, s.per_checkpoint[0].mean_abs2);
        assert_eq!(once.per_checkpoint[0].mean_abs4, s.per_checkpoint[0].mean_abs4);
        assert_eq!(once.per_checkpoint[0].mean_cross, s.per_checkpoint[0].mean_cross);
    }

    #[test]
    fn two_point_ensemble_statistics() {
        let a = synthetic(vec![vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]], vec![1.0]);
        let b = synthetic(
            vec![vec![c(0.5, 0.0), c(0.0, 0.5f64.sqrt()), c(0.5, 0.0)]],
            vec![1.0],
        );
        let mut s = EnsembleStats::for_trajectory(&a, true);
        s.accumulate(&a).unwrap();
        s.accumulate(&b).unwrap();
        assert_eq!(s.mean_abs2(2, 0).unwrap(), 0.75);
        assert!((s.mean_abs4(2, 0).unwrap() - 0.625).abs() < 1e-15);
        assert!((s.mean_cross(1, 2, 0).unwrap() - 0.0625).abs() < 1e-15);
        assert!((s.mean_cross(1, 3, 0).unwrap() - 0.03125).abs() < 1e-15);
        // |G|² samples {1, 0.5}: sd 0.3536, sem 0.25
        assert!((s.sem_abs2(2, 0).unwrap().unwrap() - 0.25).abs() < 1e-15);
        assert!((s.sem_abs4(2, 0).unwrap().unwrap() - 0.375).abs() < 1e-15);
        // delta method against a direct evaluation for a two-point sample
        let sem = s.sem_medium_factor(2, 0).unwrap().unwrap();
        assert!(sem.is_finite() && sem > 0.0);
    }

    #[test]
    fn mismatched_trajectories_are_rejected() {
        let a = synthetic(vec![vec![c(1.0, 0.0); 3]], vec![1.0]);
        let b = synthetic(vec![vec![c(1.0, 0.0); 3]], vec![2.0]);
        let mut s = EnsembleStats::for_trajectory(&a, false);
        assert!(matches!(s.accumulate(&b), Err(Error::Mismatch(_))));
        let wide = synthetic(vec![vec![c(1.0, 0.0); 4]], vec![1.0]);
        assert!(s.accumulate(&wide).is_err());
        assert!(matches!(s.mean_cross(1, 2, 0), Err(Error::CrossNotCaptured(1, 2))));
        assert!(s.mean_abs2(4, 0).is_err());
        assert!(s.mean_abs2(0, 0).is_err());
        assert!(s.mean_abs2(1, 1).is_err());
    }

    fn ordered_stats(checkpoints: Vec<f64>, repeats: usize) -> EnsembleStats {
        let t = propagate_green(&LatticeConfig::ordered(101, 51, 1.0, 0.001, checkpoints)).unwrap();
        let mut s = EnsembleStats::for_trajectory(&t, true);
        for _ in 0..repeats {
            s.accumulate(&t).unwrap();
        }
        s
    }

    #[test]
    fn observables_at_the_input_plane() {
        let s = ordered_stats(vec![0.0], 1);
        let rbs = StateSpec::RBS.moments();
        let coh = StateSpec::COHERENT.moments();
        let th = StateSpec::THERMAL.moments();
        assert_eq!(mean_intensity(&s, &coh, 51, 0).unwrap(), 10.0);
        assert_eq!(mean_intensity(&s, &coh, 50, 0).unwrap(), 0.0);
        assert_eq!(intensity_correlation(&s, &rbs, 51, 51, 0).unwrap(), 95.0);
        assert_eq!(intensity_correlation(&s, &rbs, 51, 52, 0).unwrap(), 0.0);
        assert_eq!(g2(&s, &coh, 51, 0).unwrap().value().unwrap().total, 1.0);
        assert_eq!(g2(&s, &th, 51, 0).unwrap().value().unwrap().total, 2.0);
        assert_eq!(g2(&s, &coh, 50, 0).unwrap(), G2Outcome::NoSignal);
        assert_eq!(intensity_variance(&s, &coh, 0).unwrap(), 10.0);
        assert_eq!(intensity_variance(&s, &rbs, 0).unwrap(), 5.0);
        assert_eq!(intensity_variance(&s, &th, 0).unwrap(), 110.0);
        assert_eq!(participation_number(&s, 0).unwrap(), 1.0);
    }

    #[test]
    fn ordered_lattice_has_no_fluctuations() {
        let s = ordered_stats(vec![0.5, 1.0, 3.0], 7);
        let coh = StateSpec::COHERENT.moments();
        let rbs = StateSpec::RBS.moments();
        for (z_idx, stats) in s.per_checkpoint.iter().enumerate() {
            for j in 0..101 {
                assert_eq!(stats.mean_abs4[j], stats.mean_abs2[j] * stats.mean_abs2[j]);
                if stats.mean_abs2[j] > 0.0 {
                    let f = g2(&s, &coh, j + 1, z_idx).unwrap().value().unwrap();
                    assert_eq!(f.medium, 1.0);
                    assert_eq!(f.total, 1.0);
                }
            }
            let (a, b) = (40, 55);
            let want = stats.mean_abs2[a - 1] * stats.mean_abs2[b - 1] * rbs.mean_n2fact;
            let got = intensity_correlation(&s, &rbs, a, b, z_idx).unwrap();
            assert!((got - want).abs() <= 1e-15 * want.abs().max(1e-300));
        }
        assert_eq!(s.sem_abs2(51, 1).unwrap(), Some(0.0));
    }

    #[test]
    fn ordered_intensity_at_unit_length() {
        let s = ordered_stats(vec![1.0], 1);
        let coh = StateSpec::COHERENT.moments();
        let got = mean_intensity(&s, &coh, 51, 0).unwrap();
        assert!((got - 0.501_270_809_844_695_4).abs() < 1e-5);
        let total: f64 = (1..=101).map(|j| mean_intensity(&s, &coh, j, 0).unwrap()).sum();
        assert!((total - 10.0).abs() < 1e-9);
    }

    #[test]
    fn participation_of_a_uniform_spread() {
        let m = 7;
        let amp = c((1.0 / 5.0f64).sqrt(), 0.0);
        let mut row = vec![c(0.0, 0.0); m];
        for v in row.iter_mut().take(5) {
            *v = amp;
        }
        let t = GreenTrajectory {
            injection_index: 1,
            checkpoints: vec![0.0],
            rows: vec![row],
        };
        let mut s = EnsembleStats::for_trajectory(&t, false);
        s.accumulate(&t).unwrap();
        assert!((participation_number(&s, 0).unwrap() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn ordered_participation_grows() {
        let zs: Vec<f64> = (1..=10).map(|k| 2.0 * k as f64).collect();
        let s = ordered_stats(zs, 1);
        let p: Vec<f64> = (0..10).map(|i| participation_number(&s, i).unwrap()).collect();
        assert!(p.windows(2).all(|w| w[1] > w[0]), "{p:?}");
    }
}
