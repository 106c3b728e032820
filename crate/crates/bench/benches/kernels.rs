use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use gauge_lab::dynamics::{propagate_wavefunction, PropagationOptions};
use gauge_lab::emfields::catalog::smooth_nonuniform;
use gauge_lab::lattice::build_hamiltonian;
use gauge_lab::spectral::solve_stationary;
use gauge_lab::emfields::{derive_fields, multipolar_potentials};
use gauge_lab::{GaugeFunction, GridSpec, PhysicalConstants, PotentialSet, Vec3, Wavefunction};

fn hamiltonian(c: &mut Criterion) {
    let k = PhysicalConstants::default();
    let p = PotentialSet::harmonic_trap(1.0, k.mass, k.charge, 1);
    let chi = GaugeFunction::gaussian_bump("bump", 0.3, 1.0, Vec3::zeros());
    let mut group = c.benchmark_group("hamiltonian");
    for n in [256, 1024, 4096] {
        let g = GridSpec::line(-12.0, 12.0, n).unwrap();
        group.bench_with_input(BenchmarkId::new("build_1d", n), &g, |b, g| b.iter(|| build_hamiltonian(&p, &chi, g, 0.0, &k).unwrap()));
        let h = build_hamiltonian(&p, &GaugeFunction::zero(), &g, 0.0, &k).unwrap();
        group.bench_with_input(BenchmarkId::new("lowest_8_levels", n), &h, |b, h| b.iter(|| solve_stationary(h, 8).unwrap()));
    }
    group.finish();
}

fn crank_nicolson(c: &mut Criterion) {
    let k = PhysicalConstants::default();
    let p = PotentialSet::harmonic_trap(1.0, k.mass, k.charge, 1);
    let g = GridSpec::line(-12.0, 12.0, 1024).unwrap();
    let psi = Wavefunction::gaussian(&g, Vec3::new(1.0, 0.0, 0.0), 1.0, Vec3::zeros()).normalized_copy();
    let opts = PropagationOptions::new(0.01);
    c.bench_function("crank_nicolson_100_steps_1024", |b| {
        b.iter(|| propagate_wavefunction(&p, &GaugeFunction::zero(), black_box(&psi), 1.0, &opts, &k).unwrap())
    });
}

fn multipolar(c: &mut Criterion) {
    let f = derive_fields(&smooth_nonuniform());
    let m = multipolar_potentials(&f, Vec3::zeros());
    let r = Vec3::new(0.7, -0.4, 0.3);
    c.bench_function("multipolar_vector_potential", |b| b.iter(|| m.vector.value(black_box(&r), 0.3)));
}

criterion_group!(benches, hamiltonian, crank_nicolson, multipolar);
criterion_main!(benches);
