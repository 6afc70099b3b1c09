use criterion::{black_box, criterion_group, criterion_main, BatchSize, Criterion};
use ringlab_bench::{spiral_ring, test_ring};
use ringlab_core::config::Scheme;
use ringlab_core::dynamics::{step_ensemble, Bounds, ForceModel, MeanField};
use ringlab_core::fuller::{simulate_fuller, FullerSynthesis};
use ringlab_core::gravity::{annulus_radial_force, ring_wire_force_agm};
use ringlab_core::kinetic::{dsmc_collide, CollisionParams};
use ringlab_core::Vec2;

fn gravity(c: &mut Criterion) {
    let model = test_ring();
    c.bench_function("wire_force_agm", |b| {
        b.iter(|| ring_wire_force_agm(1.0, 1.5, black_box(Vec2::new(1.4999, 0.0))).unwrap())
    });
    c.bench_function("annulus_force_near_edge", |b| {
        b.iter(|| annulus_radial_force(&model.density, black_box(1.0 + 1e-6), 1e-10).unwrap())
    });
    c.bench_function("mean_field_build", |b| b.iter(|| MeanField::from_density(&model.density, 1e-10).unwrap()));
}

fn dynamics(c: &mut Criterion) {
    let model = test_ring();
    let forces = ForceModel::new(&model, MeanField::from_density(&model.density, 1e-10).unwrap(), false);
    let ensemble = spiral_ring(10_000, 1e-8, 1);
    for (name, scheme) in [("step_leapfrog_10k", Scheme::Leapfrog), ("step_yoshida4_10k", Scheme::Yoshida4)] {
        c.bench_function(name, |b| {
            b.iter(|| step_ensemble(&ensemble, &forces, 0.0, 1e-3, scheme, Bounds::unbounded()).unwrap())
        });
    }
}

fn kinetic(c: &mut Criterion) {
    let ensemble = spiral_ring(20_000, 1e-5, 2);
    let params = CollisionParams { restitution: 0.9, particle_radius: 2e-3, cell_size: 0.05, ..Default::default() };
    let mut step = 0;
    c.bench_function("dsmc_collide_20k", |b| {
        b.iter_batched(
            || {
                step += 1;
                step
            },
            |s| dsmc_collide(&ensemble, &params, 0.01, 2, s).unwrap(),
            BatchSize::SmallInput,
        )
    });
}

fn fuller(c: &mut Criterion) {
    let syn = FullerSynthesis::calibrated(1e-12).unwrap();
    c.bench_function("fuller_to_1e-9_ball", |b| b.iter(|| simulate_fuller(black_box(1.0), 0.0, &syn, 1e-9, 100.0)));
}

criterion_group!(benches, gravity, dynamics, kinetic, fuller);
criterion_main!(benches);
