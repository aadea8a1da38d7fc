//! Reproducible Gaussian on-site disorder.
//!
//! Every realization owns an independent generator seeded by
//! [`derive_seed`], so realizations can be produced in any order or on any
//! thread and still be bit-identical.
//!
//! Uniforms come from Knuth's MMIX 64-bit linear congruential generator
//! (multiplier 6364136223846793005, increment 1442695040888963407), keeping
//! the top 53 bits of the state. Normals use the trigonometric Box–Muller
//! transform.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const LCG_MULTIPLIER: u64 = 6_364_136_223_846_793_005;
pub const LCG_INCREMENT: u64 = 1_442_695_040_888_963_407;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const UNIT_53: f64 = 1.0 / (1u64 << 53) as f64;

/// SplitMix64 output function applied to `master_seed ^ realization_index`.
///
/// The finalizer is a bijection on u64, so for a fixed master seed distinct
/// indices always get distinct seeds.
pub fn derive_seed(master_seed: u64, realization_index: u64) -> u64 {
    let mut z = (master_seed ^ realization_index).wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// 64-bit LCG producing doubles on the 2^-53 grid in [0, 1).
#[derive(Debug, Clone)]
pub struct Lcg64 {
    state: u64,
}

impl Lcg64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self
            .state
            .wrapping_mul(LCG_MULTIPLIER)
            .wrapping_add(LCG_INCREMENT);
        self.state
    }

    pub fn next_uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * UNIT_53
    }

    /// Two independent standard normals from two uniforms.
    pub fn next_normal_pair(&mut self) -> (f64, f64) {
        let mut u1 = self.next_uniform();
        if u1 == 0.0 {
            u1 = UNIT_53;
        }
        let u2 = self.next_uniform();
        let radius = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (TAU * u2).sin_cos();
        (radius * c, radius * s)
    }
}

/// `count` standard normals; for odd counts the last partner is dropped.
pub fn standard_normals(seed: u64, count: usize) -> Vec<f64> {
    let mut rng = Lcg64::new(seed);
    let mut out = Vec::with_capacity(count + 1);
    while out.len() < count {
        let (a, b) = rng.next_normal_pair();
        out.push(a);
        out.push(b);
    }
    out.truncate(count);
    out
}

/// Parameters of one disorder draw.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DisorderSpec {
    /// Standard deviation Δ of the propagation constants.
    pub delta: f64,
    pub guide_count: usize,
    pub master_seed: u64,
    pub realization_index: u64,
}

impl DisorderSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.delta >= 0.0 && self.delta.is_finite()) {
            return Err(Error::config("delta", "must be finite and nonnegative"));
        }
        Ok(())
    }
}

/// β_1..β_M drawn from N(0, Δ²): standard normals scaled by Δ.
///
/// Δ = 0 gives exactly the ordered lattice.
pub fn sample_betas(spec: &DisorderSpec) -> Result<Vec<f64>> {
    spec.validate()?;
    if spec.delta == 0.0 {
        return Ok(vec![0.0; spec.guide_count]);
    }
    let seed = derive_seed(spec.master_seed, spec.realization_index);
    let mut betas = standard_normals(seed, spec.guide_count);
    for b in &mut betas {
        *b *= spec.delta;
    }
    Ok(betas)
}
