use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use twomode_bench::{default_case, default_grid};
use twomode_core::fock::{coherent_initial, FockHamiltonian, SpectralPropagator};
use twomode_core::gaussian::{build_generator, propagator};
use twomode_core::modes::solve_secular;
use twomode_core::{fock, gaussian, Complex64};

fn normal_modes(c: &mut Criterion) {
    let (params, _) = default_case();
    c.bench_function("solve_secular", |b| b.iter(|| solve_secular(black_box(&params))));
}

fn matrix_exponential(c: &mut Criterion) {
    let (params, _) = default_case();
    let a = build_generator(&params);
    let mut group = c.benchmark_group("expm");
    for t in [0.1, 5.0, 50.0] {
        group.bench_with_input(BenchmarkId::from_parameter(t), &t, |b, &t| {
            b.iter(|| propagator(black_box(&a), t))
        });
    }
    group.finish();
}

fn gaussian_run(c: &mut Criterion) {
    let (params, init) = default_case();
    let grid = default_grid();
    c.bench_function("gaussian_simulate_801", |b| {
        b.iter(|| gaussian::simulate(black_box(&params), &init, &grid).unwrap())
    });
}

fn fock_kernels(c: &mut Criterion) {
    let (params, init) = default_case();
    let mut group = c.benchmark_group("fock");
    group.sample_size(20);
    for n_cut in [8, 16, 24] {
        let h = FockHamiltonian::build(&params, n_cut).unwrap();
        group.bench_with_input(BenchmarkId::new("eigendecomposition", n_cut), &h, |b, h| {
            b.iter(|| SpectralPropagator::new(black_box(h)).unwrap())
        });
        let prop = SpectralPropagator::new(&h).unwrap();
        let psi0 = coherent_initial(Complex64::new(1.0, 0.0), *h.basis()).state;
        let evolution = prop.prepare(&psi0).unwrap();
        group.bench_with_input(BenchmarkId::new("state_at", n_cut), &evolution, |b, e| {
            b.iter(|| e.at(black_box(12.5)))
        });
    }
    let grid = default_grid();
    group.bench_function("simulate_ncut8_801", |b| {
        b.iter(|| fock::simulate(black_box(&params), &init, 8, &grid).unwrap())
    });
    group.finish();
}

criterion_group!(benches, normal_modes, matrix_exponential, gaussian_run, fock_kernels);
criterion_main!(benches);
