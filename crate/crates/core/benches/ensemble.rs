use anderson_waveguides::ensemble::{run_ensemble, ArchiveCapture, EnsembleRequest, LatticeGeometry};
use anderson_waveguides::phase_space::{wigner_grid, GreenSample, GridSpec};
use anderson_waveguides::{Execution, StateSpec};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64;

fn ensemble(c: &mut Criterion) {
    let geo = LatticeGeometry {
        dz: 0.005,
        ..LatticeGeometry::default()
    };
    let mut group = c.benchmark_group("ensemble");
    group.sample_size(10);
    for exec in [Execution::Sequential, Execution::Parallel] {
        group.bench_with_input(BenchmarkId::new(format!("{exec:?}"), 32), &exec, |b, &exec| {
            b.iter(|| {
                run_ensemble(&EnsembleRequest {
                    geometry: &geo,
                    z_checkpoints: &[5.0, 10.0],
                    delta_over_c: 1.5,
                    realizations: 32,
                    master_seed: 1,
                    capture_cross: false,
                    archive: ArchiveCapture::None,
                    execution: exec,
                })
                .unwrap()
            });
        });
    }
    group.finish();
}

fn wigner(c: &mut Criterion) {
    let fock = StateSpec::CCS1.fock().unwrap();
    let samples: Vec<GreenSample> = (0..100)
        .map(|k| GreenSample::new(Complex64::from_polar(0.9, k as f64 * 0.1)).unwrap())
        .collect();
    let spec = GridSpec::covering(10, 0.1);
    let mut group = c.benchmark_group("wigner_grid");
    group.sample_size(10);
    for exec in [Execution::Sequential, Execution::Parallel] {
        group.bench_with_input(BenchmarkId::new(format!("{exec:?}"), "ccs1"), &exec, |b, &exec| {
            b.iter(|| wigner_grid(&fock, &samples, spec, exec).unwrap());
        });
    }
    group.finish();
}

criterion_group!(benches, ensemble, wigner);
criterion_main!(benches);
