//! Wigner function and photon-number distribution of the output mode at the
//! injection guide.
//!
//! With a(z) = g a(0) (g = G_{j0,j0}(z)) and the other guides empty, the
//! output Wigner function of a truncated input Σ c_n|n⟩ expands analytically:
//!
//! ```text
//! W(x + iy) = (2/π) e^{−2(x²+y²)} Σ_{j,k} A_jk g^j ḡ^k I_jk(x, y)
//! A_jk  = Σ_m c̄_{m+k} c_{m+j} √((m+j)!(m+k)!) / m!
//! I_jk  = Σ_{l≤k} Σ_{s≤j} (−1)^{j+k+s} i^{−(l+s)} / ((k−l)! l! (j−s)! s!)
//!                 · I_{l+s}(y) I_{k−l+j−s}(−x)
//! I_r(u) = (2u)^r + Σ_{m=2,4,…≤r} (−1)^{m/2} 2^{−m/2} r! / ((m/2)! (r−m)!) (2u)^{r−m}
//! ```
//!
//! The constant is fixed so that the vacuum gives (2/π) e^{−2|α|²}.

pub mod oracle;

use std::f64::consts::{FRAC_2_PI, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::parallel::{map_indexed, Execution};
use crate::special::{factorial_table, laguerre};
use crate::states::FockVector;

/// Amplitudes larger than 1 by more than this are unphysical.
pub const AMPLITUDE_TOLERANCE: f64 = 1e-8;

/// Renormalised PND bins below this flag a quadrature failure.
pub const PND_NEGATIVITY_FLOOR: f64 = -1e-3;

/// G_{j0,j0}(z) for one realization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenSample(Complex64);

impl GreenSample {
    pub fn new(g: Complex64) -> Result<Self> {
        if !(g.re.is_finite() && g.im.is_finite()) || g.norm() > 1.0 + AMPLITUDE_TOLERANCE {
            return Err(Error::Numerical(format!(
                "Green amplitude {g} exceeds unit modulus"
            )));
        }
        Ok(Self(g))
    }

    pub fn identity() -> Self {
        Self(Complex64::new(1.0, 0.0))
    }

    pub fn value(self) -> Complex64 {
        self.0
    }
}

/// I_r(u) for r = 0..=r_max, summed as written.
fn i_r_table(r_max: usize, u: f64, fact: &[f64]) -> Vec<f64> {
    let two_u = 2.0 * u;
    (0..=r_max)
        .map(|r| {
            let mut acc = two_u.powi(r as i32);
            for m in (2..=r).step_by(2) {
                let half = m / 2;
                let sign = if half % 2 == 0 { 1.0 } else { -1.0 };
                acc += sign * 2f64.powi(-(half as i32)) * fact[r] / (fact[half] * fact[r - m])
                    * two_u.powi((r - m) as i32);
            }
            acc
        })
        .collect()
}

/// i^{−p}
fn i_pow_neg(p: usize) -> Complex64 {
    match p % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    }
}

/// Precomputed, grid-independent pieces of the expansion for one input state.
#[derive(Debug, Clone)]
pub struct WignerExpansion {
    n: usize,
    fact: Vec<f64>,
    /// A_jk at [j * (n+1) + k]
    state_weights: Vec<Complex64>,
    /// Σ_{l+s=p} (−1)^{j+k+s} i^{−p} / ((k−l)! l! (j−s)! s!) at [(j*(n+1)+k)*(2n+1) + p]
    mixing: Vec<Complex64>,
}

impl WignerExpansion {
    pub fn new(state: &FockVector) -> Self {
        let n = state.truncation();
        let fact = factorial_table(2 * n + 1);
        let c = state.coefficients();
        let dim = n + 1;
        let span = 2 * n + 1;

        let mut state_weights = vec![Complex64::new(0.0, 0.0); dim * dim];
        for j in 0..=n {
            for k in 0..=n {
                let mut acc = Complex64::new(0.0, 0.0);
                for m in 0..=(n - j.max(k)) {
                    acc += c[m + k].conj() * c[m + j] * ((fact[m + j] * fact[m + k]).sqrt() / fact[m]);
                }
                state_weights[j * dim + k] = acc;
            }
        }

        let mut mixing = vec![Complex64::new(0.0, 0.0); dim * dim * span];
        for j in 0..=n {
            for k in 0..=n {
                let base = (j * dim + k) * span;
                for l in 0..=k {
                    for s in 0..=j {
                        let sign = if (j + k + s) % 2 == 0 { 1.0 } else { -1.0 };
                        let w = sign / (fact[k - l] * fact[l] * fact[j - s] * fact[s]);
                        mixing[base + l + s] += i_pow_neg(l + s) * w;
                    }
                }
            }
        }

        Self {
            n,
            fact,
            state_weights,
            mixing,
        }
    }

    pub fn truncation(&self) -> usize {
        self.n
    }

    /// (2/π) e^{−2|α|²} A_jk I_jk(x, y) for every (j, k).
    pub fn node_terms(&self, x: f64, y: f64) -> Vec<Complex64> {
        let n = self.n;
        let dim = n + 1;
        let span = 2 * n + 1;
        let iy = i_r_table(2 * n, y, &self.fact);
        let ix = i_r_table(2 * n, -x, &self.fact);
        let envelope = FRAC_2_PI * (-2.0 * (x * x + y * y)).exp();
        let mut out = vec![Complex64::new(0.0, 0.0); dim * dim];
        for j in 0..=n {
            for k in 0..=n {
                let weight = self.state_weights[j * dim + k];
                if weight == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let mix = &self.mixing[(j * dim + k) * span..];
                let mut i_jk = Complex64::new(0.0, 0.0);
                for p in 0..=(j + k) {
                    i_jk += mix[p] * (iy[p] * ix[j + k - p]);
                }
                out[j * dim + k] = weight * i_jk * envelope;
            }
        }
        out
    }

    /// g^j ḡ^k for every (j, k).
    pub fn amplitude_powers(&self, g: Complex64) -> Vec<Complex64> {
        let dim = self.n + 1;
        let mut pow = Vec::with_capacity(dim);
        let mut acc = Complex64::new(1.0, 0.0);
        for _ in 0..dim {
            pow.push(acc);
            acc *= g;
        }
        let mut out = Vec::with_capacity(dim * dim);
        for j in 0..dim {
            for k in 0..dim {
                out.push(pow[j] * pow[k].conj());
            }
        }
        out
    }

    /// Complex value of the expansion; the imaginary part is round-off.
    pub fn evaluate_complex(&self, g: GreenSample, x: f64, y: f64) -> Complex64 {
        self.node_terms(x, y)
            .iter()
            .zip(self.amplitude_powers(g.value()))
            .map(|(t, p)| t * p)
            .sum()
    }

    pub fn evaluate(&self, g: GreenSample, x: f64, y: f64) -> f64 {
        self.evaluate_complex(g, x, y).re
    }
}

/// Output Wigner function W(x + iy) for one realization with amplitude `g`.
pub fn wigner_point(state: &FockVector, g: GreenSample, x: f64, y: f64) -> f64 {
    WignerExpansion::new(state).evaluate(g, x, y)
}

/// Closed-form Wigner function of |n⟩: (2/π)(−1)^n e^{−2|α|²} L_n(4|α|²).
pub fn number_state_wigner(n: usize, x: f64, y: f64) -> f64 {
    let r2 = x * x + y * y;
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    sign * FRAC_2_PI * (-2.0 * r2).exp() * laguerre(n, 4.0 * r2)
}

/// Rectangular phase-space grid with nodes at x_min + i·dx, y_min + k·dy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub dx: f64,
    pub dy: f64,
}

impl GridSpec {
    pub const DEFAULT_STEP: f64 = 0.1;

    /// Square grid covering [−(√N+2), √N+2]², edges snapped outward to the step.
    pub fn covering(truncation: usize, step: f64) -> Self {
        let half = ((truncation as f64).sqrt() + 2.0) / step;
        let half = half.ceil() * step;
        Self {
            x_min: -half,
            x_max: half,
            y_min: -half,
            y_max: half,
            dx: step,
            dy: step,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = [self.x_min, self.x_max, self.y_min, self.y_max, self.dx, self.dy]
            .iter()
            .all(|v| v.is_finite())
            && self.dx > 0.0
            && self.dy > 0.0
            && self.x_max >= self.x_min
            && self.y_max >= self.y_min;
        if ok {
            Ok(())
        } else {
            Err(Error::config("grid", format!("invalid phase-space grid {self:?}")))
        }
    }

    pub fn nx(&self) -> usize {
        ((self.x_max - self.x_min) / self.dx).round() as usize + 1
    }

    pub fn ny(&self) -> usize {
        ((self.y_max - self.y_min) / self.dy).round() as usize + 1
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx
    }

    pub fn y(&self, k: usize) -> f64 {
        self.y_min + k as f64 * self.dy
    }
}

/// Disorder-averaged Wigner function sampled on a grid; `values[k][i]` is
/// W(x_i + i y_k).
#[derive(Debug, Clone, PartialEq)]
pub struct WignerGrid {
    pub spec: GridSpec,
    pub values: Vec<Vec<f64>>,
    pub realization_count: usize,
    /// Truncation N of the input state, when known.
    pub truncation: Option<usize>,
}

impl WignerGrid {
    /// Riemann sum Σ W dx dy.
    pub fn integral(&self) -> f64 {
        let total: f64 = self.values.iter().flatten().sum();
        total * self.spec.dx * self.spec.dy
    }

    /// Σ W·f dx dy over the nodes.
    fn overlap(&self, f: impl Fn(f64, f64) -> f64) -> f64 {
        let mut acc = 0.0;
        for (k, row) in self.values.iter().enumerate() {
            let y = self.spec.y(k);
            for (i, w) in row.iter().enumerate() {
                acc += w * f(self.spec.x(i), y);
            }
        }
        acc * self.spec.dx * self.spec.dy
    }
}

/// Average of the per-realization Wigner functions over `samples`.
///
/// W is a polynomial in (g, ḡ), so the average over realizations equals the
/// expansion evaluated with the sample moments ⟨g^j ḡ^k⟩; those are formed
/// once, in sample order.
pub fn wigner_grid(
    state: &FockVector,
    samples: &[GreenSample],
    spec: GridSpec,
    exec: Execution,
) -> Result<WignerGrid> {
    if samples.is_empty() {
        return Err(Error::Unsupported(
            "cannot average a Wigner function over zero realizations".into(),
        ));
    }
    spec.validate()?;
    let expansion = WignerExpansion::new(state);
    let dim = (expansion.truncation() + 1).pow(2);
    let mut moments = vec![Complex64::new(0.0, 0.0); dim];
    for s in samples {
        for (m, p) in moments.iter_mut().zip(expansion.amplitude_powers(s.value())) {
            *m += p;
        }
    }
    let inv = 1.0 / samples.len() as f64;
    for m in &mut moments {
        *m *= inv;
    }

    let values = map_indexed(exec, spec.ny(), |k| {
        let y = spec.y(k);
        (0..spec.nx())
            .map(|i| {
                expansion
                    .node_terms(spec.x(i), y)
                    .iter()
                    .zip(&moments)
                    .map(|(t, m)| t * m)
                    .sum::<Complex64>()
                    .re
            })
            .collect()
    });

    Ok(WignerGrid {
        spec,
        values,
        realization_count: samples.len(),
        truncation: Some(expansion.truncation()),
    })
}

/// Photon-number distribution recovered from a Wigner grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotonNumberDistribution {
    /// π Σ W W_n dx dy, before renormalisation.
    pub raw: Vec<f64>,
    /// `raw` scaled to unit sum.
    pub normalized: Vec<f64>,
    /// Σ_n raw[n]; close to 1 when the grid captures the state.
    pub raw_total: f64,
}

/// P(n) for n = 0..=n_max from the overlap of W with the number-state
/// Wigner functions (trace identity P(n) = π ∫ W W_n d²α).
pub fn pnd(grid: &WignerGrid, n_max: usize) -> Result<PhotonNumberDistribution> {
    if let Some(n) = grid.truncation {
        if n_max < n {
            return Err(Error::config(
                "n_max",
                format!("must be at least the state truncation {n}"),
            ));
        }
    }
    let raw: Vec<f64> = (0..=n_max)
        .map(|n| PI * grid.overlap(|x, y| number_state_wigner(n, x, y)))
        .collect();
    let raw_total: f64 = raw.iter().sum();
    if !(raw_total.is_finite() && raw_total > 0.0) {
        return Err(Error::Numerical(format!(
            "photon-number distribution has non-positive total {raw_total}"
        )));
    }
    let normalized: Vec<f64> = raw.iter().map(|p| p / raw_total).collect();
    if let Some((n, p)) = normalized
        .iter()
        .enumerate()
        .find(|(_, p)| **p < PND_NEGATIVITY_FLOOR)
    {
        return Err(Error::Numerical(format!(
            "quadrature failure: P({n}) = {p:e} after renormalisation"
        )));
    }
    Ok(PhotonNumberDistribution {
        raw,
        normalized,
        raw_total,
    })
}
