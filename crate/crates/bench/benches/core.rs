use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use dressed_bench::bench_spec;
use dressed_core::dynamics::{self, DriveParams, InitialState};
use dressed_core::labeling::{self, ContinuityConfig};
use dressed_core::{observables, operators, spectrum};

fn eigensolve(c: &mut Criterion) {
    let mut group = c.benchmark_group("eigensolve");
    group.sample_size(10);
    for fock in [40, 80, 120] {
        let spec = bench_spec(4, fock);
        group.bench_with_input(BenchmarkId::from_parameter(fock), &spec, |b, spec| {
            b.iter(|| spectrum::solve(spec).unwrap())
        });
    }
    group.finish();
}

fn labeling(c: &mut Criterion) {
    let spec = bench_spec(4, 120);
    let sol = spectrum::solve(&spec).unwrap();
    let mut cfg = ContinuityConfig::new(0.01, 60);
    cfg.truncation_margin = 40;
    c.bench_function("continuity_walk", |b| b.iter(|| labeling::label_continuity(&sol, 0, &cfg).unwrap()));
    c.bench_function("recursive", |b| b.iter(|| labeling::label_recursive(&sol, 0, 60).unwrap()));
    let ladder = labeling::label_continuity(&sol, 0, &cfg).unwrap();
    let curve = observables::cavity_frequency_curve(&ladder).unwrap();
    let det = observables::DetectorConfig::default();
    c.bench_function("detect_features", |b| b.iter(|| observables::detect_features(&curve, &det)));
}

fn dynamics_run(c: &mut Criterion) {
    let spec = bench_spec(4, 60);
    let sol = spectrum::solve(&spec).unwrap();
    let drive = DriveParams::new(2e-3, 1.0, 5.0, 40).with_dt(0.01);
    let init = InitialState::dressed_vacuum(&sol, 0, 40).unwrap();
    let mut group = c.benchmark_group("dynamics_500_steps");
    group.sample_size(10);
    group.bench_function("lab", |b| b.iter(|| dynamics::integrate_lab(&spec, &drive, &init).unwrap()));
    group.bench_function("displaced", |b| {
        b.iter(|| dynamics::integrate_displaced(&spec, &drive, &init).unwrap())
    });
    group.finish();
}

fn sparse_apply(c: &mut Criterion) {
    let spec = bench_spec(10, 350);
    let h = operators::build_composite_sparse(&spec).unwrap();
    let x = vec![num_complex::Complex64::new(1.0, 0.0); h.dim()];
    c.bench_function("sparse_apply_7371", |b| b.iter(|| h.apply(&x)));
}

criterion_group!(benches, eigensolve, labeling, dynamics_run, sparse_apply);
criterion_main!(benches);
