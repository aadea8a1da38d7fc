//! Input states injected into the lattice.
//!
//! Truncated pure states (CCS, RBS, PS) are represented by their number-basis
//! coefficients; thermal, coherent and squeezed-vacuum references only carry
//! closed-form moments. Every observable in the lattice factorises into a
//! medium part and the pair (⟨a†a⟩, ⟨a†²a²⟩) computed here.

use std::f64::consts::{FRAC_PI_2, SQRT_2};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use crate::special::{double_factorial, hermite};
use crate::special::{binomial, binomial_exact, factorial};

/// i^k
fn i_pow(k: usize) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Normalised pure state Σ_{k=0}^{N} c_k |k⟩.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    coeffs: Vec<Complex64>,
}

impl FockVector {
    /// Normalises `raw` numerically.
    pub fn from_unnormalized(raw: Vec<Complex64>) -> Result<Self> {
        let norm: f64 = raw.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt();
        if raw.is_empty() || !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::Numerical(format!(
                "cannot normalise Fock coefficients (norm {norm})"
            )));
        }
        Ok(Self {
            coeffs: raw.into_iter().map(|c| c / norm).collect(),
        })
    }

    /// |n⟩
    pub fn number_state(n: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
        coeffs[n] = Complex64::new(1.0, 0.0);
        Self { coeffs }
    }

    pub fn vacuum() -> Self {
        Self::number_state(0)
    }

    /// Truncation N (highest occupied number state index).
    pub fn truncation(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Photon-number distribution |c_k|².
    pub fn probabilities(&self) -> Vec<f64> {
        self.coeffs.iter().map(Complex64::norm_sqr).collect()
    }

    /// Moments summed directly over |c_k|².
    pub fn moments(&self) -> StateMoments {
        let (mut n1, mut n2) = (0.0, 0.0);
        for (k, p) in self.probabilities().into_iter().enumerate() {
            let k = k as f64;
            n1 += p * k;
            n2 += p * k * (k - 1.0);
        }
        StateMoments {
            mean_n: n1,
            mean_n2fact: n2,
        }
    }
}

/// (⟨a†a⟩, ⟨a†²a²⟩) of an input state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateMoments {
    pub mean_n: f64,
    pub mean_n2fact: f64,
}

impl StateMoments {
    /// Input g² = ⟨a†²a²⟩/⟨a†a⟩²; `None` for the vacuum.
    pub fn g2(&self) -> Option<f64> {
        (self.mean_n > 0.0).then(|| self.mean_n2fact / (self.mean_n * self.mean_n))
    }
}

/// Complementary coherent state Σ √(k!) (α*)^{N−k} i^k |k⟩, normalised.
pub fn ccs_coefficients(alpha: Complex64, n: usize) -> Result<FockVector> {
    let conj = alpha.conj();
    let raw = (0..=n)
        .map(|k| factorial(k).sqrt() * conj.powi((n - k) as i32) * i_pow(k))
        .collect();
    FockVector::from_unnormalized(raw)
}

/// Reciprocal binomial state Σ binom(N,k)^{1/2} e^{ik(φ−π/2)} |k⟩, normalised.
pub fn rbs_coefficients(phi: f64, n: usize) -> Result<FockVector> {
    let raw = (0..=n)
        .map(|k| binomial(n, k).sqrt() * Complex64::from_polar(1.0, k as f64 * (phi - FRAC_PI_2)))
        .collect();
    FockVector::from_unnormalized(raw)
}

/// Polynomial state Σ binom(N,k)^{-1/2} H_{N−k}(x/√2) i^k / √((2N−2k−1)!!) |k⟩.
pub fn ps_coefficients(x: f64, n: usize) -> Result<FockVector> {
    let raw = (0..=n)
        .map(|k| {
            let dfact = double_factorial(2 * (n - k) as i64 - 1) as f64;
            let amp = hermite(n - k, x / SQRT_2) / (binomial(n, k) * dfact).sqrt();
            i_pow(k) * amp
        })
        .collect();
    FockVector::from_unnormalized(raw)
}

fn weighted_moments(weights: impl Iterator<Item = f64>) -> StateMoments {
    let (mut w0, mut w1, mut w2) = (0.0, 0.0, 0.0);
    for (k, w) in weights.enumerate() {
        let k = k as f64;
        w0 += w;
        w1 += w * k;
        w2 += w * k * (k - 1.0);
    }
    StateMoments {
        mean_n: w1 / w0,
        mean_n2fact: w2 / w0,
    }
}

/// CCS moments: ratios of Σ k! (k, k(k−1)) |α|^{2(N−k)} to Σ k! |α|^{2(N−k)}.
pub fn ccs_moments(alpha: Complex64, n: usize) -> StateMoments {
    let a2 = alpha.norm_sqr();
    weighted_moments((0..=n).map(|k| factorial(k) * a2.powi((n - k) as i32)))
}

/// RBS moments from exact binomial sums (N/2 and N(N−1)/4).
pub fn rbs_moments(n: usize) -> StateMoments {
    let exact = (|| {
        let (mut s0, mut s1, mut s2) = (0u128, 0u128, 0u128);
        for k in 0..=n as u64 {
            let b = binomial_exact(n as u64, k)?;
            let k = k as u128;
            s0 = s0.checked_add(b)?;
            s1 = s1.checked_add(b.checked_mul(k)?)?;
            s2 = s2.checked_add(b.checked_mul(k * k.saturating_sub(1))?)?;
        }
        Some((s0, s1, s2))
    })();
    match exact {
        Some((s0, s1, s2)) => StateMoments {
            mean_n: s1 as f64 / s0 as f64,
            mean_n2fact: s2 as f64 / s0 as f64,
        },
        None => {
            let n = n as f64;
            StateMoments {
                mean_n: n / 2.0,
                mean_n2fact: n * (n - 1.0) / 4.0,
            }
        }
    }
}

/// PS moments with weights binom(N,k)^{-1} H²_{N−k}(x/√2) / (2N−2k−1)!!.
pub fn ps_moments(x: f64, n: usize) -> StateMoments {
    weighted_moments((0..=n).map(|k| {
        let h = hermite(n - k, x / SQRT_2);
        h * h / (binomial(n, k) * double_factorial(2 * (n - k) as i64 - 1) as f64)
    }))
}

/// An input-state family with its parameters.
///
/// Parsed from `family:param1[,param2]`, e.g. `ccs:0.1414,10`, `rbs:0,20`,
/// `ps:0.374,12`, `thermal:10`, `coherent:10` (|α|²), `squeezed:10`
/// (sinh²|ζ|). The CCS amplitude may be complex (`ccs:1.2+0.3i,8`). The
/// names `ccs1 ccs2 ps1 ps2 rbs ts cs ss` select the reference states with
/// ⟨a†a⟩ ≈ 10.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum StateSpec {
    Ccs { alpha: Complex64, n: usize },
    Rbs { phi: f64, n: usize },
    Ps { x: f64, n: usize },
    Thermal { mean: f64 },
    Coherent { mean: f64 },
    Squeezed { sinh_sq: f64 },
}

impl StateSpec {
    pub const CCS1: Self = Self::Ccs {
        alpha: Complex64::new(0.1414, 0.0),
        n: 10,
    };
    pub const CCS2: Self = Self::Ccs {
        alpha: Complex64::new(1.916, 0.0),
        n: 11,
    };
    pub const PS1: Self = Self::Ps { x: 0.374, n: 12 };
    pub const PS2: Self = Self::Ps { x: 0.9345, n: 13 };
    pub const RBS: Self = Self::Rbs { phi: 0.0, n: 20 };
    pub const THERMAL: Self = Self::Thermal { mean: 10.0 };
    pub const COHERENT: Self = Self::Coherent { mean: 10.0 };
    pub const SQUEEZED: Self = Self::Squeezed { sinh_sq: 10.0 };

    /// The five truncated states followed by the three references.
    pub fn reference_set() -> [(&'static str, Self); 8] {
        [
            ("ccs1", Self::CCS1),
            ("ccs2", Self::CCS2),
            ("ps1", Self::PS1),
            ("ps2", Self::PS2),
            ("rbs", Self::RBS),
            ("ts", Self::THERMAL),
            ("cs", Self::COHERENT),
            ("ss", Self::SQUEEZED),
        ]
    }

    pub fn is_truncated(&self) -> bool {
        matches!(self, Self::Ccs { .. } | Self::Rbs { .. } | Self::Ps { .. })
    }

    /// Number-basis coefficients; mixed or infinite-rank states are rejected.
    pub fn fock(&self) -> Result<FockVector> {
        match *self {
            Self::Ccs { alpha, n } => ccs_coefficients(alpha, n),
            Self::Rbs { phi, n } => rbs_coefficients(phi, n),
            Self::Ps { x, n } => ps_coefficients(x, n),
            _ => Err(Error::Unsupported(format!(
                "state `{self}` is not a truncated pure state and has no Fock vector"
            ))),
        }
    }

    /// Closed-form (⟨a†a⟩, ⟨a†²a²⟩).
    pub fn moments(&self) -> StateMoments {
        match *self {
            Self::Ccs { alpha, n } => ccs_moments(alpha, n),
            Self::Rbs { n, .. } => rbs_moments(n),
            Self::Ps { x, n } => ps_moments(x, n),
            Self::Thermal { mean } => StateMoments {
                mean_n: mean,
                mean_n2fact: 2.0 * mean * mean,
            },
            Self::Coherent { mean } => StateMoments {
                mean_n: mean,
                mean_n2fact: mean * mean,
            },
            Self::Squeezed { sinh_sq } => StateMoments {
                mean_n: sinh_sq,
                mean_n2fact: sinh_sq * (1.0 + 3.0 * sinh_sq),
            },
        }
    }

    /// Filesystem-safe label, e.g. `ccs_0.1414_10`.
    pub fn label(&self) -> String {
        self.to_string()
            .chars()
            .map(|c| match c {
                ':' | ',' => '_',
                '+' => 'p',
                c => c,
            })
            .collect()
    }

    fn validate(self, text: &str) -> Result<Self> {
        let bad = |reason: &str| {
            Err(Error::StateSpec {
                spec: text.to_string(),
                reason: reason.to_string(),
            })
        };
        match self {
            Self::Ccs { alpha, .. } if !(alpha.re.is_finite() && alpha.im.is_finite()) => {
                bad("α must be finite")
            }
            Self::Rbs { phi, .. } if !phi.is_finite() => bad("φ must be finite"),
            Self::Ps { x, .. } if !x.is_finite() => bad("x must be finite"),
            Self::Thermal { mean } | Self::Coherent { mean } | Self::Squeezed { sinh_sq: mean }
                if !(mean.is_finite() && mean >= 0.0) =>
            {
                bad("mean photon number must be finite and nonnegative")
            }
            ok => Ok(ok),
        }
    }
}

impl fmt::Display for StateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Ccs { alpha, n } if alpha.im == 0.0 => write!(f, "ccs:{},{n}", alpha.re),
            Self::Ccs { alpha, n } => write!(f, "ccs:{alpha},{n}"),
            Self::Rbs { phi, n } => write!(f, "rbs:{phi},{n}"),
            Self::Ps { x, n } => write!(f, "ps:{x},{n}"),
            Self::Thermal { mean } => write!(f, "thermal:{mean}"),
            Self::Coherent { mean } => write!(f, "coherent:{mean}"),
            Self::Squeezed { sinh_sq } => write!(f, "squeezed:{sinh_sq}"),
        }
    }
}

impl FromStr for StateSpec {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let trimmed = text.trim();
        let err = |reason: String| Error::StateSpec {
            spec: text.to_string(),
            reason,
        };
        let Some((family, params)) = trimmed.split_once(':') else {
            return Self::reference_set()
                .into_iter()
                .find(|(name, _)| name.eq_ignore_ascii_case(trimmed))
                .map(|(_, s)| s)
                .ok_or_else(|| err("expected `family:params` or a reference name".into()));
        };
        let params: Vec<&str> = params.split(',').map(str::trim).collect();
        let real = |s: &str| s.parse::<f64>().map_err(|e| err(format!("`{s}`: {e}")));
        let count = |s: &str| s.parse::<usize>().map_err(|e| err(format!("`{s}`: {e}")));
        let arity = |want: usize| {
            if params.len() == want {
                Ok(())
            } else {
                Err(err(format!("expected {want} parameter(s), got {}", params.len())))
            }
        };
        let spec = match family.trim().to_ascii_lowercase().as_str() {
            "ccs" => {
                arity(2)?;
                let alpha = Complex64::from_str(params[0])
                    .map_err(|_| err(format!("`{}` is not a complex number", params[0])))?;
                Self::Ccs {
                    alpha,
                    n: count(params[1])?,
                }
            }
            "rbs" => {
                arity(2)?;
                Self::Rbs {
                    phi: real(params[0])?,
                    n: count(params[1])?,
                }
            }
            "ps" => {
                arity(2)?;
                Self::Ps {
                    x: real(params[0])?,
                    n: count(params[1])?,
                }
            }
            "thermal" | "ts" => {
                arity(1)?;
                Self::Thermal {
                    mean: real(params[0])?,
                }
            }
            "coherent" | "cs" => {
                arity(1)?;
                Self::Coherent {
                    mean: real(params[0])?,
                }
            }
            "squeezed" | "ss" => {
                arity(1)?;
                Self::Squeezed {
                    sinh_sq: real(params[0])?,
                }
            }
            other => return Err(err(format!("unknown family `{other}`"))),
        };
        spec.validate(text)
    }
}

impl TryFrom<String> for StateSpec {
    type Error = Error;

    fn try_from(value: String) -> Result<Self> {
        value.parse()
    }
}

impl From<StateSpec> for String {
    fn from(value: StateSpec) -> Self {
        value.to_string()
    }
}
