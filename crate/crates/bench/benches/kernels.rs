use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use dipolium::coupling::sweep_spectrum;
use dipolium::dynamics::{build_kernel, fit_lorentzian, solve_volterra, KernelConfig, Remainder};
use dipolium::{quadrature, GreenProvider};
use dipolium_bench::{lorentzian_kernel, opposite_pair, sphere, LINE};
use num_complex::Complex64;

fn green_series(c: &mut Criterion) {
    let green = sphere();
    let atoms = opposite_pair();
    let (a, b) = (atoms[0].position, atoms[1].position);
    c.bench_function("sphere_scattering_opposite", |bch| {
        bch.iter(|| green.scattering(black_box(&a), black_box(&b), black_box(LINE)).unwrap())
    });
    c.bench_function("sphere_scattering_coincident", |bch| {
        bch.iter(|| green.scattering(black_box(&a), black_box(&a), black_box(LINE)).unwrap())
    });
}

fn spectrum(c: &mut Criterion) {
    let green = sphere();
    let atoms = opposite_pair();
    let grid = quadrature::linspace(LINE - 2e-5, LINE + 2e-5, 64);
    let mut group = c.benchmark_group("spectrum");
    group.sample_size(10);
    group.bench_function("sweep_64", |bch| bch.iter(|| sweep_spectrum(&atoms, &green, black_box(&grid)).unwrap()));
    group.finish();
}

fn kernels(c: &mut Criterion) {
    let green = sphere();
    let atoms = opposite_pair();
    let (lo, hi) = (LINE - 2e-5, LINE + 2e-5);
    let grid = quadrature::linspace(lo, hi, 160);
    let res = fit_lorentzian(&sweep_spectrum(&atoms, &green, &grid).unwrap(), (0, 0), (lo, hi)).unwrap();
    let cfg = KernelConfig { gamma0: 1e-13, window: (lo, hi), steps: 160, resonance: Some(res), remainder: Remainder::Markov };
    let mut group = c.benchmark_group("kernel");
    group.sample_size(10);
    group.bench_function("build_markov_160", |bch| bch.iter(|| build_kernel(&atoms, &green, black_box(&cfg)).unwrap()));
    group.bench_function("analytic", |bch| bch.iter(|| lorentzian_kernel(black_box(1e-6))));
    group.finish();
}

fn volterra(c: &mut Criterion) {
    let kernel = lorentzian_kernel(1e-6);
    let initial = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
    let dt = 0.1 / kernel.rate_hint();
    let mut group = c.benchmark_group("volterra");
    group.sample_size(10);
    for steps in [500usize, 2000] {
        group.bench_function(format!("lorentzian_{steps}_steps"), |bch| {
            bch.iter(|| solve_volterra(&kernel, black_box(&initial), steps as f64 * dt, dt).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, green_series, spectrum, kernels, volterra);
criterion_main!(benches);
