//! Independent Wigner reference by numerical Fourier inversion of the
//! characteristic function.
//!
//! The output mode is g·a plus vacuum from the other guides, so
//! χ_out(ξ) = ⟨ψ|D(ḡξ)|ψ⟩ e^{−(1−|g|²)|ξ|²/2} and
//! W(α) = π^{−2} ∫ χ_out(ξ) e^{αξ̄ − ᾱξ} d²ξ.
//! D(re^{iθ}) = R(φ) e^{irQ} R(−φ) with Q = a + a†, φ = θ − π/2 and
//! R(φ) = diag(e^{iφn}); Q is diagonalised once in a truncated Fock space
//! large enough that every displaced component inside the ξ disc stays
//! inside it. The ξ integral is a trapezoid sum over that disc, which is
//! spectrally accurate for the Gaussian-damped integrand.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::GreenSample;
use crate::states::FockVector;

/// Quadrature step in ξ. Aliasing repeats W with period π/step in α.
pub const DEFAULT_STEP: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleSettings {
    /// Radius of the ξ disc.
    pub radius: f64,
    /// Dimension of the Fock space carrying Q.
    pub dimension: usize,
    pub step: f64,
}

impl OracleSettings {
    /// |χ| ≲ e^{−|ξ|²/2} |ξ|^{2N} / N! is below 1e-15 beyond the radius.
    pub fn for_truncation(n: usize) -> Self {
        let radius = 2.0 * ((n + 1) as f64).sqrt() + 6.0;
        let reach = radius + (n as f64).sqrt() + 5.0;
        Self {
            radius,
            dimension: (reach * reach).ceil() as usize,
            step: DEFAULT_STEP,
        }
    }
}

/// χ_out tabulated on the ξ grid, ready for point evaluation of W.
#[derive(Debug, Clone)]
pub struct WignerOracle {
    /// Node coordinates (shared by Re ξ and Im ξ).
    axis: Vec<f64>,
    /// χ at [a * n + b] for ξ = axis[a] + i axis[b].
    chi: Vec<Complex64>,
    step: f64,
}

impl WignerOracle {
    pub fn new(state: &FockVector, g: GreenSample) -> Self {
        Self::with_settings(state, g, OracleSettings::for_truncation(state.truncation()))
    }

    pub fn with_settings(state: &FockVector, g: GreenSample, settings: OracleSettings) -> Self {
        let c = state.coefficients();
        let dim = settings.dimension.max(c.len());
        let mut q = DMatrix::<f64>::zeros(dim, dim);
        for n in 1..dim {
            let s = (n as f64).sqrt();
            q[(n - 1, n)] = s;
            q[(n, n - 1)] = s;
        }
        let eig = SymmetricEigen::new(q);
        let lambda = eig.eigenvalues;
        let v = eig.eigenvectors;

        let half = (settings.radius / settings.step).ceil() as i64;
        let axis: Vec<f64> = (-half..=half).map(|k| k as f64 * settings.step).collect();
        let g = g.value();
        let damp = 1.0 - g.norm_sqr();

        let mut chi = Vec::with_capacity(axis.len() * axis.len());
        let mut rotated = vec![Complex64::new(0.0, 0.0); c.len()];
        let r2_max = settings.radius * settings.radius;
        for &u in &axis {
            for &w in &axis {
                let xi = Complex64::new(u, w);
                if xi.norm_sqr() > r2_max {
                    chi.push(Complex64::new(0.0, 0.0));
                    continue;
                }
                let arg = g.conj() * xi;
                let r = arg.norm();
                let phi = arg.arg() - FRAC_PI_2;
                for (n, (dst, cn)) in rotated.iter_mut().zip(c).enumerate() {
                    *dst = Complex64::from_polar(1.0, -phi * n as f64) * cn;
                }
                let mut overlap = Complex64::new(0.0, 0.0);
                for k in 0..dim {
                    let mut uk = Complex64::new(0.0, 0.0);
                    for (n, rn) in rotated.iter().enumerate() {
                        uk += rn * v[(n, k)];
                    }
                    overlap += Complex64::from_polar(uk.norm_sqr(), r * lambda[k]);
                }
                chi.push(overlap * (-0.5 * damp * xi.norm_sqr()).exp());
            }
        }
        Self {
            axis,
            chi,
            step: settings.step,
        }
    }

    /// W(x + iy).
    pub fn value(&self, x: f64, y: f64) -> f64 {
        let n = self.axis.len();
        let col_phase: Vec<Complex64> = self
            .axis
            .iter()
            .map(|v| Complex64::from_polar(1.0, -2.0 * x * v))
            .collect();
        let mut total = Complex64::new(0.0, 0.0);
        for (a, u) in self.axis.iter().enumerate() {
            let row = &self.chi[a * n..(a + 1) * n];
            let s: Complex64 = row.iter().zip(&col_phase).map(|(c, p)| c * p).sum();
            total += s * Complex64::from_polar(1.0, 2.0 * y * u);
        }
        total.re * self.step * self.step / (PI * PI)
    }
}

/// One-shot reference value of W(x + iy).
pub fn wigner_oracle(state: &FockVector, g: GreenSample, x: f64, y: f64) -> f64 {
    WignerOracle::new(state, g).value(x, y)
}
