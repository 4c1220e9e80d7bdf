use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use std::hint::black_box;

use ptlattice::ground_state::{ground_state, GroundStateRequest};
use ptlattice::lattice::gpe_rhs;
use ptlattice::semiclassical::{gaussian_packet, momentum_transform};
use ptlattice::LatticeParameters;
use ptlattice_bench::{four_well, lattice_300, simulation};

fn bench_rhs(c: &mut Criterion) {
    let psi = gaussian_packet(300, 150.5, 0.1, 0.017);
    let params = LatticeParameters::uniform(300, 0.1, 1.0, 0.5);
    c.bench_function("gpe_rhs_300", |b| {
        b.iter(|| black_box(gpe_rhs(black_box(&psi), black_box(&params))))
    });
}

fn bench_controller(c: &mut Criterion) {
    let sim4 = simulation(&four_well());
    c.bench_function("controller_evaluate_4", |b| {
        b.iter(|| black_box(sim4.evaluate().unwrap()))
    });
    let sim300 = simulation(&lattice_300());
    c.bench_function("controller_evaluate_300", |b| {
        b.iter(|| black_box(sim300.evaluate().unwrap()))
    });
}

fn bench_controlled_step(c: &mut Criterion) {
    let config = four_well();
    c.bench_function("controlled_step_4", |b| {
        b.iter_batched(
            || simulation(&config),
            |mut sim| {
                sim.advance();
                black_box(sim.time())
            },
            BatchSize::SmallInput,
        )
    });
}

fn bench_momentum_transform(c: &mut Criterion) {
    let psi = gaussian_packet(300, 150.5, 0.3, 0.017);
    c.bench_function("momentum_transform_300", |b| {
        b.iter(|| black_box(momentum_transform(black_box(&psi))))
    });
}

fn bench_ground_state(c: &mut Criterion) {
    let mut params = LatticeParameters::uniform(6, 0.0, 1.0, 1.0);
    params.onsite = vec![-5.0, -5.0, 0.0, 0.0, -5.0, -5.0];
    let mut group = c.benchmark_group("preparation");
    group.sample_size(20);
    group.bench_function("ground_state_6", |b| {
        b.iter(|| {
            let request = GroundStateRequest::new(params.clone(), 1.0);
            black_box(ground_state(&request).unwrap())
        })
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_rhs,
    bench_controller,
    bench_controlled_step,
    bench_momentum_transform,
    bench_ground_state
);
criterion_main!(benches);
