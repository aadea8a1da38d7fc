//! Analytic cross-checks runnable from the command line.

use num_complex::Complex64;

use crate::disorder::{derive_seed, sample_betas, DisorderSpec};
use crate::error::Result;
use crate::lattice::{ordered_lattice_oracle, propagate_green, LatticeConfig};
use crate::parallel::Execution;
use crate::phase_space::oracle::WignerOracle;
use crate::phase_space::{number_state_wigner, pnd, wigner_grid, GreenSample, GridSpec, WignerExpansion};
use crate::states::{FockVector, StateSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn outcome(name: &'static str, value: f64, tolerance: f64, what: &str) -> CheckOutcome {
    CheckOutcome {
        name,
        passed: value.is_finite() && value < tolerance,
        detail: format!("{what} = {value:.3e} (tolerance {tolerance:.0e})"),
    }
}

fn ordered_lattice() -> Result<CheckOutcome> {
    let cfg = LatticeConfig::ordered(101, 51, 1.0, 0.001, vec![5.0]);
    let t = propagate_green(&cfg)?;
    let err = t.rows[0]
        .iter()
        .enumerate()
        .map(|(j, g)| (g - ordered_lattice_oracle(j as i64 + 1, 51, 1.0, 5.0)).norm())
        .fold(0.0, f64::max);
    Ok(outcome("ordered lattice vs Bessel (z=5)", err, 1e-4, "max |ΔG|"))
}

fn norm_conservation() -> Result<CheckOutcome> {
    let mut worst: f64 = 0.0;
    for r in 0..3 {
        let betas = sample_betas(&DisorderSpec {
            delta: 5.0,
            guide_count: 101,
            master_seed: derive_seed(0, 5f64.to_bits()),
            realization_index: r,
        })?;
        let t = propagate_green(&LatticeConfig::with_defaults(betas, vec![20.0]))?;
        worst = worst.max((t.norm_sqr(0) - 1.0).abs());
    }
    Ok(outcome("norm conservation (Δ/C=5, z=20)", worst, 1e-8, "max |Σ|G|²−1|"))
}

fn reference_moments() -> CheckOutcome {
    let rbs = StateSpec::RBS.moments();
    let rbs_err = (rbs.mean_n - 10.0).abs().max((rbs.mean_n2fact - 95.0).abs());
    let energy = [StateSpec::CCS1, StateSpec::CCS2, StateSpec::PS1, StateSpec::PS2, StateSpec::RBS]
        .iter()
        .map(|s| (s.moments().mean_n - 10.0).abs())
        .fold(0.0, f64::max);
    CheckOutcome {
        name: "named-state moments",
        passed: rbs_err < 1e-9 && energy < 0.1,
        detail: format!("RBS(0,20) moment error {rbs_err:.1e}; max |⟨n⟩−10| over named states {energy:.3}"),
    }
}

fn number_states() -> CheckOutcome {
    let pts = [(0.0, 0.0), (0.4, -0.3), (-1.2, 1.5), (2.0, 0.5)];
    let mut worst: f64 = 0.0;
    for n in 0..=10 {
        let exp = WignerExpansion::new(&FockVector::number_state(n));
        for &(x, y) in &pts {
            worst = worst.max((exp.evaluate(GreenSample::identity(), x, y) - number_state_wigner(n, x, y)).abs());
        }
    }
    outcome("Wigner expansion vs Laguerre form (n≤10)", worst, 1e-10, "max |ΔW|")
}

fn wigner_quadrature() -> Result<CheckOutcome> {
    let states = [
        FockVector::number_state(1),
        StateSpec::Ccs {
            alpha: Complex64::new(0.8, 0.5),
            n: 4,
        }
        .fock()?,
        StateSpec::Ps { x: 0.5, n: 3 }.fock()?,
    ];
    let gs = [Complex64::new(1.0, 0.0), Complex64::new(0.6, 0.3), Complex64::new(0.0, 0.0)];
    let mut worst: f64 = 0.0;
    for state in &states {
        let exp = WignerExpansion::new(state);
        for &g in &gs {
            let g = GreenSample::new(g)?;
            let oracle = WignerOracle::new(state, g);
            for x in [-2.0, 0.0, 2.0] {
                for y in [-1.0, 1.0] {
                    worst = worst.max((exp.evaluate(g, x, y) - oracle.value(x, y)).abs());
                }
            }
        }
    }
    Ok(outcome("Wigner expansion vs characteristic-function quadrature", worst, 1e-4, "max |ΔW|"))
}

fn identity_pnd() -> Result<CheckOutcome> {
    let fock = StateSpec::CCS1.fock()?;
    let grid = wigner_grid(
        &fock,
        &[GreenSample::identity()],
        GridSpec::covering(fock.truncation(), GridSpec::DEFAULT_STEP),
        Execution::Parallel,
    )?;
    let p = pnd(&grid, fock.truncation())?;
    let bin = p
        .normalized
        .iter()
        .zip(fock.probabilities())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let norm = (grid.integral() - 1.0).abs();
    Ok(CheckOutcome {
        name: "identity-channel PND (CCS₁)",
        passed: bin < 2e-2 && norm < 2e-2 && p.normalized[10] > 0.99,
        detail: format!(
            "max bin error {bin:.1e}, |∫W−1| = {norm:.1e}, P(10) = {:.5}",
            p.normalized[10]
        ),
    })
}

/// Every battery, in a fixed order. Failures to run a battery count as
/// failures of that battery.
pub fn run_all() -> Vec<CheckOutcome> {
    let wrap = |name: &'static str, r: Result<CheckOutcome>| {
        r.unwrap_or_else(|e| CheckOutcome {
            name,
            passed: false,
            detail: e.to_string(),
        })
    };
    vec![
        wrap("ordered lattice", ordered_lattice()),
        wrap("norm conservation", norm_conservation()),
        reference_moments(),
        number_states(),
        wrap("Wigner quadrature", wigner_quadrature()),
        wrap("identity PND", identity_pnd()),
    ]
}
