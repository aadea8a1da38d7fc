//! Green's-function propagation through a 1-D array of coupled waveguides.
//!
//! For light injected into guide `j0`, the row G_{j,j0}(z) obeys
//!
//! ```text
//! i dG_j/dz = β_j G_j + C (G_{j+1} + G_{j-1}),   G_0 = G_{M+1} = 0,
//! ```
//!
//! which is integrated with the Crank–Nicolson (implicit midpoint) rule
//! `(I + i h/2 H) G(z+h) = (I − i h/2 H) G(z)`. H is real symmetric, so the
//! step is a Cayley transform and preserves Σ_j |G_j|² to round-off.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::bessel_j;
use crate::tridiag::FactoredTridiagonal;

/// Off-grid checkpoints within this distance of a dz multiple count as aligned.
const ALIGN_TOLERANCE: f64 = 1e-12;

/// Geometry, coupling, disorder and integration grid of one lattice realization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeConfig {
    pub guide_count: usize,
    /// 1-based index of the illuminated guide.
    pub injection_index: usize,
    pub coupling: f64,
    pub dz: f64,
    pub z_checkpoints: Vec<f64>,
    /// Propagation constants β_1..β_M.
    pub betas: Vec<f64>,
}

impl LatticeConfig {
    pub const DEFAULT_GUIDES: usize = 101;
    pub const DEFAULT_INJECTION: usize = 51;
    pub const DEFAULT_COUPLING: f64 = 1.0;
    pub const DEFAULT_DZ: f64 = 0.001;

    /// 101 guides, injection at 51, C = 1, dz = 0.001.
    pub fn with_defaults(betas: Vec<f64>, z_checkpoints: Vec<f64>) -> Self {
        Self {
            guide_count: Self::DEFAULT_GUIDES,
            injection_index: Self::DEFAULT_INJECTION,
            coupling: Self::DEFAULT_COUPLING,
            dz: Self::DEFAULT_DZ,
            z_checkpoints,
            betas,
        }
    }

    /// Disorder-free lattice (all β_j = 0).
    pub fn ordered(
        guide_count: usize,
        injection_index: usize,
        coupling: f64,
        dz: f64,
        z_checkpoints: Vec<f64>,
    ) -> Self {
        Self {
            guide_count,
            injection_index,
            coupling,
            dz,
            z_checkpoints,
            betas: vec![0.0; guide_count],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.guide_count < 3 {
            return Err(Error::config("guide_count", "need at least 3 guides"));
        }
        if self.injection_index < 1 || self.injection_index > self.guide_count {
            return Err(Error::config(
                "injection_index",
                format!("must lie in [1, {}]", self.guide_count),
            ));
        }
        if !(self.dz > 0.0 && self.dz.is_finite()) {
            return Err(Error::config("dz", "must be positive and finite"));
        }
        if !self.coupling.is_finite() {
            return Err(Error::config("coupling", "must be finite"));
        }
        if self.betas.len() != self.guide_count {
            return Err(Error::config(
                "betas",
                format!("expected {} entries, got {}", self.guide_count, self.betas.len()),
            ));
        }
        if let Some(j) = self.betas.iter().position(|b| !b.is_finite()) {
            return Err(Error::config("betas", format!("β_{} is not finite", j + 1)));
        }
        validate_checkpoints(&self.z_checkpoints)
    }
}

pub(crate) fn validate_checkpoints(z: &[f64]) -> Result<()> {
    if z.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::config("z_checkpoints", "must be finite and nonnegative"));
    }
    if z.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::config("z_checkpoints", "must be strictly ascending"));
    }
    Ok(())
}

/// The row G_{·,j0}(z) sampled at each requested checkpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct GreenTrajectory {
    pub injection_index: usize,
    pub checkpoints: Vec<f64>,
    pub rows: Vec<Vec<Complex64>>,
}

impl GreenTrajectory {
    pub fn guide_count(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    /// Σ_j |G_{j,j0}|² at checkpoint `idx`.
    pub fn norm_sqr(&self, idx: usize) -> f64 {
        self.rows[idx].iter().map(Complex64::norm_sqr).sum()
    }

    /// G_{j0,j0} at checkpoint `idx`.
    pub fn injection_amplitude(&self, idx: usize) -> Complex64 {
        self.rows[idx][self.injection_index - 1]
    }
}

/// One Crank–Nicolson step of fixed length, with the implicit side pre-factored.
struct CrankNicolsonStep {
    explicit_diag: Vec<Complex64>,
    explicit_off: Complex64,
    implicit: FactoredTridiagonal,
}

impl CrankNicolsonStep {
    fn new(betas: &[f64], coupling: f64, h: f64) -> Result<Self> {
        let m = betas.len();
        let half = 0.5 * h;
        let off = Complex64::new(0.0, half * coupling);
        let mut sub = vec![off; m];
        let mut sup = vec![off; m];
        sub[0] = Complex64::new(0.0, 0.0);
        sup[m - 1] = Complex64::new(0.0, 0.0);
        let diag: Vec<_> = betas.iter().map(|b| Complex64::new(1.0, half * b)).collect();
        Ok(Self {
            explicit_diag: betas.iter().map(|b| Complex64::new(1.0, -half * b)).collect(),
            explicit_off: -off,
            implicit: FactoredTridiagonal::new(&sub, &diag, &sup)?,
        })
    }

    fn advance(&self, g: &mut [Complex64], scratch: &mut [Complex64]) {
        let m = g.len();
        let off = self.explicit_off;
        scratch[0] = self.explicit_diag[0] * g[0] + off * g[1];
        for j in 1..m - 1 {
            scratch[j] = self.explicit_diag[j] * g[j] + off * (g[j - 1] + g[j + 1]);
        }
        scratch[m - 1] = self.explicit_diag[m - 1] * g[m - 1] + off * g[m - 2];
        self.implicit.solve_in_place(scratch);
        g.copy_from_slice(scratch);
    }
}

/// Integrate G_{j,j0}(z) from the delta initial condition to every checkpoint.
///
/// A checkpoint that is not a multiple of `dz` (relative to the previous
/// off-grid checkpoint) is reached with one shortened final step.
pub fn propagate_green(config: &LatticeConfig) -> Result<GreenTrajectory> {
    config.validate()?;
    let m = config.guide_count;
    let mut g = vec![Complex64::new(0.0, 0.0); m];
    g[config.injection_index - 1] = Complex64::new(1.0, 0.0);
    let mut scratch = g.clone();

    let full = CrankNicolsonStep::new(&config.betas, config.coupling, config.dz)?;
    let mut origin = 0.0;
    let mut steps_taken: u64 = 0;
    let mut rows = Vec::with_capacity(config.z_checkpoints.len());

    for &target in &config.z_checkpoints {
        let exact = (target - origin) / config.dz;
        let nearest = exact.round();
        let aligned = ((exact - nearest) * config.dz).abs() <= ALIGN_TOLERANCE;
        let full_steps = if aligned { nearest } else { exact.floor() } as u64;
        while steps_taken < full_steps {
            full.advance(&mut g, &mut scratch);
            steps_taken += 1;
        }
        if !aligned {
            let rest = target - (origin + full_steps as f64 * config.dz);
            if rest > 0.0 {
                CrankNicolsonStep::new(&config.betas, config.coupling, rest)?
                    .advance(&mut g, &mut scratch);
            }
            origin = target;
            steps_taken = 0;
        }
        rows.push(g.clone());
    }

    Ok(GreenTrajectory {
        injection_index: config.injection_index,
        checkpoints: config.z_checkpoints.clone(),
        rows,
    })
}

/// Closed-form G_{j,j0}(z) of the infinite ordered lattice:
/// (−i)^{|j−j0|} J_{|j−j0|}(2Cz).
///
/// Agrees with a finite lattice only while the wavefront (speed 2C) is far
/// from the edges.
pub fn ordered_lattice_oracle(j: i64, j0: i64, coupling: f64, z: f64) -> Complex64 {
    let d = (j - j0).abs();
    let phase = match d % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    };
    phase * bessel_j(d, 2.0 * coupling * z)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_dev(a: &[Complex64], b: &[Complex64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn initial_row_is_a_delta() {
        let cfg = LatticeConfig::ordered(101, 51, 1.0, 0.001, vec![0.0]);
        let t = propagate_green(&cfg).unwrap();
        for (j, g) in t.rows[0].iter().enumerate() {
            let want = if j == 50 { 1.0 } else { 0.0 };
            assert_eq!(*g, Complex64::new(want, 0.0));
        }
    }

    #[test]
    fn decoupled_guide_only_rotates_phase() {
        let mut cfg = LatticeConfig::ordered(101, 51, 0.0, 0.001, vec![2.0]);
        cfg.betas = vec![5.0; 101];
        let t = propagate_green(&cfg).unwrap();
        let g = t.rows[0][50];
        // Crank–Nicolson phase error is (h²/12) β³ z ≈ 2e-5 here
        assert!((g - Complex64::new(0.0, -10.0).exp()).norm() < 5e-5);
        assert!((g.norm() - 1.0).abs() < 1e-12);
        assert!(t.rows[0].iter().enumerate().all(|(j, v)| j == 50 || v.norm() == 0.0));
    }

    #[test]
    fn injection_amplitude_at_unit_length_matches_bessel() {
        let cfg = LatticeConfig::ordered(101, 51, 1.0, 0.001, vec![1.0]);
        let t = propagate_green(&cfg).unwrap();
        let p = t.rows[0][50].norm_sqr();
        let want = bessel_j(0, 2.0).powi(2);
        assert!((p - want).abs() < 1e-6, "{p} vs {want}");
        assert!((want - 0.050_127_080_984_469_55).abs() < 1e-15);
    }

    #[test]
    fn oracle_special_values() {
        assert_eq!(ordered_lattice_oracle(51, 51, 0.7, 0.0), Complex64::new(1.0, 0.0));
        assert_eq!(ordered_lattice_oracle(52, 51, 1.0, 0.0).norm(), 0.0);
        assert_eq!(ordered_lattice_oracle(50, 51, 1.0, 0.0).norm(), 0.0);
        let v = ordered_lattice_oracle(51, 51, 1.0, 1.0);
        assert!((v.re - 0.223_890_779_141_235_6).abs() < 1e-14 && v.im == 0.0);
    }

    #[test]
    fn oracle_solves_the_lattice_equation() {
        // i dG_d/dz = C (G_{d+1} + G_{d-1}), checked by central differences
        let (c, z, h) = (0.8, 2.3, 1e-5);
        for d in -4i64..=4 {
            let dgdz = (ordered_lattice_oracle(d, 0, c, z + h) - ordered_lattice_oracle(d, 0, c, z - h))
                / (2.0 * h);
            let lhs = Complex64::i() * dgdz;
            let rhs = (ordered_lattice_oracle(d + 1, 0, c, z) + ordered_lattice_oracle(d - 1, 0, c, z)) * c;
            assert!((lhs - rhs).norm() < 1e-8, "d={d}");
        }
    }

    #[test]
    fn zero_disorder_agrees_with_oracle_at_z5() {
        let cfg = LatticeConfig::ordered(101, 51, 1.0, 0.001, vec![5.0]);
        let t = propagate_green(&cfg).unwrap();
        let oracle: Vec<_> = (1..=101).map(|j| ordered_lattice_oracle(j, 51, 1.0, 5.0)).collect();
        assert!(max_dev(&t.rows[0], &oracle) < 1e-4);
    }

    #[test]
    fn second_order_convergence() {
        // exact reference: the wavefront stays far from the edges up to z = 3
        let z = 3.0;
        let oracle: Vec<_> = (1..=61).map(|j| ordered_lattice_oracle(j, 31, 1.0, z)).collect();
        let err = |dz: f64| {
            let t = propagate_green(&LatticeConfig::ordered(61, 31, 1.0, dz, vec![z])).unwrap();
            max_dev(&t.rows[0], &oracle)
        };
        let ratio = err(0.02) / err(0.01);
        assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn off_grid_checkpoint_uses_a_short_final_step() {
        let base = LatticeConfig::ordered(41, 21, 1.0, 0.01, vec![1.005, 2.0]);
        let t = propagate_green(&base).unwrap();
        assert_eq!(t.checkpoints, vec![1.005, 2.0]);
        let oracle: Vec<_> = (1..=41).map(|j| ordered_lattice_oracle(j, 21, 1.0, 1.005)).collect();
        assert!(max_dev(&t.rows[0], &oracle) < 1e-4);
        assert!((t.norm_sqr(1) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let mut cfg = LatticeConfig::ordered(101, 51, 1.0, 0.001, vec![1.0]);
        cfg.betas[3] = f64::NAN;
        assert!(matches!(propagate_green(&cfg), Err(Error::Config { .. })));
        let cfg = LatticeConfig::ordered(2, 1, 1.0, 0.001, vec![1.0]);
        assert!(propagate_green(&cfg).is_err());
        let cfg = LatticeConfig::ordered(11, 12, 1.0, 0.001, vec![1.0]);
        assert!(propagate_green(&cfg).is_err());
        let cfg = LatticeConfig::ordered(11, 6, 1.0, 0.001, vec![1.0, 1.0]);
        assert!(propagate_green(&cfg).is_err());
        let cfg = LatticeConfig::ordered(11, 6, 1.0, 0.0, vec![1.0]);
        assert!(propagate_green(&cfg).is_err());
    }
}
