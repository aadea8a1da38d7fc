use anderson_waveguides::config::ExperimentConfig;
use anderson_waveguides::ensemble::ArchiveCapture;
use anderson_waveguides::experiment::{build_archive, simulate, summarize, wigner_pipeline};
use anderson_waveguides::observables::G2Outcome;
use anderson_waveguides::phase_space::{number_state_wigner, wigner_point, GreenSample, GridSpec};
use anderson_waveguides::{Error, Execution, StateSpec};

fn small(delta: Vec<f64>, z: Vec<f64>, r: u64) -> ExperimentConfig {
    let mut cfg = ExperimentConfig {
        delta_over_c: delta,
        z_checkpoints: z,
        realizations: r,
        master_seed: 5,
        input_states: vec![StateSpec::CCS1, StateSpec::RBS, StateSpec::THERMAL],
        ..ExperimentConfig::default()
    };
    cfg.lattice.guide_count = 41;
    cfg.lattice.injection_index = 21;
    cfg.lattice.dz = 0.005;
    cfg
}

#[test]
fn input_profile_at_zero_distance() {
    let cfg = small(vec![0.0], vec![0.0], 1);
    let runs = simulate(&cfg).unwrap();
    let rows = summarize(&runs, &StateSpec::Coherent { mean: 10.0 }).unwrap();
    for row in &rows {
        let want = if row.guide_index == 21 { 10.0 } else { 0.0 };
        assert_eq!(row.mean_intensity, want);
        assert_eq!(row.participation, 1.0);
        if row.guide_index != 21 {
            assert_eq!(row.g2, G2Outcome::NoSignal);
        }
    }
}

#[test]
fn ordered_ensemble_has_no_spread() {
    let cfg = small(vec![0.0], vec![2.0], 40);
    let run = &simulate(&cfg).unwrap()[0];
    for j in 1..=41 {
        assert_eq!(run.stats.sem_abs2(j, 0).unwrap(), Some(0.0));
        let m2 = run.stats.mean_abs2(j, 0).unwrap();
        assert_eq!(run.stats.mean_abs4(j, 0).unwrap(), m2 * m2);
    }
}

#[test]
fn shared_ensemble_matches_per_state_runs() {
    let mut cfg = small(vec![1.0], vec![1.0, 3.0], 12);
    let shared = summarize(&simulate(&cfg).unwrap(), &StateSpec::RBS).unwrap();
    cfg.input_states = vec![StateSpec::RBS];
    let alone = summarize(&simulate(&cfg).unwrap(), &StateSpec::RBS).unwrap();
    assert_eq!(shared, alone);
}

#[test]
fn execution_modes_agree() {
    let mut cfg = small(vec![2.0], vec![1.5], 70);
    cfg.execution = Execution::Sequential;
    let a = simulate(&cfg).unwrap();
    cfg.execution = Execution::Parallel;
    assert_eq!(a, simulate(&cfg).unwrap());
}

#[test]
fn identity_archive_gives_input_wigner() {
    let mut cfg = small(vec![0.0], vec![0.0], 1);
    cfg.capture.archive = ArchiveCapture::FullRow;
    let archive = build_archive(&cfg, &simulate(&cfg).unwrap()).unwrap();
    let state = StateSpec::Ps { x: 0.374, n: 6 };
    let spec = GridSpec::covering(6, 0.1);
    let out = wigner_pipeline(&archive, &state, 0.0, 0.0, Some(spec), None, Execution::Parallel).unwrap();
    let fock = state.fock().unwrap();
    for (k, row) in out.grid.values.iter().enumerate() {
        for (i, w) in row.iter().enumerate() {
            let want = wigner_point(&fock, GreenSample::identity(), spec.x(i), spec.y(k));
            assert!((w - want).abs() < 1e-13);
        }
    }
    for (p, q) in out.pnd.normalized.iter().zip(fock.probabilities()) {
        assert!((p - q).abs() < 1e-6);
    }
}

#[test]
fn long_ordered_propagation_empties_the_injection_guide() {
    // |J_0(2·20)|² ≈ 5e-5: the output is essentially vacuum
    let mut cfg = small(vec![0.0], vec![20.0], 1);
    cfg.lattice.guide_count = 101;
    cfg.lattice.injection_index = 51;
    cfg.capture.archive = ArchiveCapture::Injection;
    let archive = build_archive(&cfg, &simulate(&cfg).unwrap()).unwrap();
    let out = wigner_pipeline(&archive, &StateSpec::CCS1, 0.0, 20.0, None, None, Execution::Parallel).unwrap();
    assert!(out.pnd.normalized[0] > 0.99);
    let k = out.grid.spec.ny() / 2;
    let i = out.grid.spec.nx() / 2;
    assert!((out.grid.values[k][i] - number_state_wigner(0, 0.0, 0.0)).abs() < 1e-2);
}

#[test]
fn pipeline_diagnostics() {
    let cfg = small(vec![0.0], vec![1.0], 2);
    let runs = simulate(&cfg).unwrap();
    assert!(build_archive(&cfg, &runs).is_none());

    let mut with = cfg.clone();
    with.capture.archive = ArchiveCapture::Injection;
    let archive = build_archive(&with, &simulate(&with).unwrap()).unwrap();
    let mut empty = archive.clone();
    empty.capture = ArchiveCapture::None;
    let err = wigner_pipeline(&empty, &StateSpec::CCS1, 0.0, 1.0, None, None, Execution::Sequential).unwrap_err();
    assert!(matches!(err, Error::Config { ref key, .. } if key == "capture.archive"));
    let err = wigner_pipeline(&archive, &StateSpec::THERMAL, 0.0, 1.0, None, None, Execution::Sequential).unwrap_err();
    assert_eq!(err.exit_code(), 1);
    assert!(wigner_pipeline(&archive, &StateSpec::CCS1, 0.5, 1.0, None, None, Execution::Sequential).is_err());
}
