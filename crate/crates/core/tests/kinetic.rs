use std::f64::consts::PI;

use proptest::prelude::*;
use rand::Rng;
use ringlab_core::config::IntegratorConfig;
use ringlab_core::dynamics::{step_ensemble, Bounds, ForceModel, MeanField, ParticleEnsemble};
use ringlab_core::gravity::NoField;
use ringlab_core::kinetic::*;
use ringlab_core::rng::stream;
use ringlab_core::stats::block_bootstrap_slope;
use ringlab_core::{Error, RingModel, ScenarioConfig, Vec2};

/// Particles spread over the annulus `[lo, hi]` with uniform surface density.
fn annulus_positions(n: usize, lo: f64, hi: f64, seed: u64) -> Vec<Vec2> {
    let mut rng = stream(seed, &[1]);
    (0..n)
        .map(|_| {
            let r = (lo * lo + (hi * hi - lo * lo) * rng.random::<f64>()).sqrt();
            Vec2::from_polar(r, 2.0 * PI * rng.random::<f64>())
        })
        .collect()
}

fn kinetic_energy(v: &[Vec2], m: &[f64]) -> f64 {
    v.iter().zip(m).map(|(x, w)| 0.5 * w * x.norm_sq()).sum()
}

#[test]
fn maxwellian_moments_round_trip() {
    let n = 100_000;
    let (u, t) = (Vec2::new(0.3, -0.2), 1.0);
    let v = sample_maxwellian(u, t, n, 21).unwrap();
    for axis in 0..2 {
        let c: Vec<f64> = v.iter().map(|x| if axis == 0 { x.x } else { x.y }).collect();
        let mean = c.iter().sum::<f64>() / n as f64;
        let var = c.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let target = if axis == 0 { u.x } else { u.y };
        assert!((mean - target).abs() < 5.0 * (t / n as f64).sqrt());
        assert!((var - t).abs() < 5.0 * (2.0 / n as f64).sqrt());
    }

    let w = 2f64.powi(-16);
    let e = ParticleEnsemble::new(annulus_positions(n, 1.0, 2.0, 21), v, vec![w; n], 21).unwrap();
    let cells = RadialCells::uniform(1.0, 2.0, 1).unwrap();
    let m = compute_moments(&e, &cells, Frame::Cartesian).moments[0];
    assert_eq!(m.count, n);
    assert_eq!(m.rho, n as f64 * w / (3.0 * PI));
    assert!((m.u - u).norm() < 5.0 * m.se_u());
    assert!((m.t - t).abs() < 5.0 * m.se_t());
    assert!((m.pressure() - m.rho * m.t).abs() < 1e-15);
    // Second moments about the mean and the heat flux of a drifting Maxwellian.
    let (se_d, se_o) = m.se_p();
    assert!((m.p.xy - u.x * u.y).abs() < 5.0 * se_o);
    assert!((m.p.xx - (t + u.x * u.x)).abs() < 5.0 * se_d);
    let q0 = m.q - m.u * (2.0 * m.t);
    assert!(q0.x.abs() < 5.0 * m.se_q() && q0.y.abs() < 5.0 * m.se_q(), "{q0:?}");
}

#[test]
fn temperature_zero_and_location_family() {
    let v = sample_maxwellian(Vec2::new(1.0, 2.0), 0.0, 50, 3).unwrap();
    assert!(v.iter().all(|x| *x == Vec2::new(1.0, 2.0)));
    let a = sample_maxwellian(Vec2::ZERO, 0.7, 1000, 4).unwrap();
    let b = sample_maxwellian(Vec2::new(3.0, 0.0), 0.7, 1000, 4).unwrap();
    assert!(a.iter().zip(&b).all(|(x, y)| *x + Vec2::new(3.0, 0.0) == *y));
    assert!(matches!(sample_maxwellian(Vec2::ZERO, -1e-3, 1, 0), Err(Error::Domain(_))));
}

/// Two-body collision worked in the centre-of-mass frame.
fn two_body_oracle(v1: Vec2, v2: Vec2, m1: f64, m2: f64, e: f64, n: Vec2) -> (Vec2, Vec2) {
    let mt = m1 + m2;
    let vcm = (v1 * m1 + v2 * m2) * (1.0 / mt);
    let g = v1 - v2;
    let gp = g - n * ((1.0 + e) * g.dot(n));
    (vcm + gp * (m2 / mt), vcm - gp * (m1 / mt))
}

#[test]
fn half_restitution_matches_two_body_algebra() {
    let (v1, v2, m1, m2) = (Vec2::new(0.8, 0.3), Vec2::new(-0.4, 0.1), 1.0, 3.0);
    let n = Vec2::from_polar(1.0, 0.4);
    let (a, b, loss) = binary_collision(v1, v2, m1, m2, 0.5, n);
    let (oa, ob) = two_body_oracle(v1, v2, m1, m2, 0.5, n);
    assert!((a - oa).norm() < 1e-15 && (b - ob).norm() < 1e-15);
    let gn = (v1 - v2).dot(n);
    assert!(((a - b).dot(n) + 0.5 * gn).abs() < 1e-15);
    let mu = m1 * m2 / (m1 + m2);
    let direct = kinetic_energy(&[v1, v2], &[m1, m2]) - kinetic_energy(&[a, b], &[m1, m2]);
    assert!((loss - 0.75 * mu * gn * gn / 2.0).abs() < 1e-16);
    assert!((direct - loss).abs() < 1e-15);
    assert_eq!(binary_collision(Vec2::new(1.0, 0.0), Vec2::new(-1.0, 0.0), 1.0, 1.0, 1.0, Vec2::new(1.0, 0.0)).2, 0.0);
}

fn gas(n: usize, side: f64, t: f64, seed: u64) -> ParticleEnsemble {
    let mut rng = stream(seed, &[2]);
    let pos = (0..n).map(|_| Vec2::new(side * rng.random::<f64>(), side * rng.random::<f64>())).collect();
    let vel = sample_maxwellian(Vec2::new(0.1, 0.0), t, n, seed).unwrap();
    let masses = (0..n).map(|_| 0.5 + rng.random::<f64>()).collect();
    ParticleEnsemble::new(pos, vel, masses, seed).unwrap()
}

fn params(e: f64, radius: f64, cell: f64) -> CollisionParams {
    CollisionParams { restitution: e, particle_radius: radius, cell_size: cell, ..Default::default() }
}

#[test]
fn dsmc_step_keeps_momentum_mass_and_its_energy_ledger() {
    let e = gas(20_000, 1.0, 1.0, 5);
    let p = params(0.9, 2e-3, 0.05);
    let (next, stats) = dsmc_collide(&e, &p, 0.01, 5, 0).unwrap();
    assert!(stats.collisions > 1000, "{}", stats.collisions);
    let scale: f64 = e.velocities.iter().zip(&e.masses).map(|(v, m)| m * v.norm()).sum();
    assert!(stats.momentum_residual < 1e-12 * scale);
    assert_eq!(next.masses, e.masses);
    assert_eq!(next.positions, e.positions);
    let direct = e.kinetic_energy() - next.kinetic_energy();
    assert!(direct > 0.0);
    assert!((direct - stats.energy_dissipated).abs() < 1e-12 * e.kinetic_energy());
    let (ratio_lo, ratio_hi) = stats
        .events
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), ev| (lo.min(ev.energy_loss), hi.max(ev.energy_loss)));
    assert!(ratio_lo >= 0.0 && ratio_hi > 0.0);
    assert!((stats.lambda - 0.01 * 20_000.0 / (2.0 * stats.collisions as f64)).abs() < 1e-15);
}

#[test]
fn collisions_are_reproducible_across_thread_counts() {
    let e = gas(5000, 1.0, 1.0, 6);
    let p = params(0.8, 2e-3, 0.05);
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| dsmc_collide(&e, &p, 0.01, 77, 3).unwrap())
    };
    let (a, sa) = run(1);
    let (b, sb) = run(4);
    assert_eq!(a, b);
    assert_eq!(format!("{sa:?}"), format!("{sb:?}"));
}

#[test]
fn cooling_rate_equals_the_ledger_rate() {
    let n = 20_000;
    let v = sample_maxwellian(Vec2::ZERO, 1.0, n, 8).unwrap();
    let e = ParticleEnsemble::new(annulus_positions(n, 1.0, 2.0, 8), v, vec![1.0 / n as f64; n], 8).unwrap();
    let dt = 0.01;
    let (next, stats) = dsmc_collide(&e, &params(0.9, 2e-3, 0.05), dt, 8, 0).unwrap();
    // Pair midpoints of the annulus stay inside one cell spanning its hull.
    let cells = RadialCells::uniform(0.0, 2.5, 1).unwrap();
    let field = compute_moments(&e, &cells, Frame::Cartesian);
    let zeta = estimate_cooling_rate(&stats, &field)[0].unwrap();
    let m = field.moments[0];
    let rate = (e.kinetic_energy() - next.kinetic_energy()) / (dt * cells.area(0));
    let ledger = rate / (2.0 * m.rho * m.t);
    assert!(zeta > 0.0);
    assert!((zeta - ledger).abs() < 1e-10 * ledger, "{zeta} vs {ledger}");
}

#[test]
fn elastic_and_collisionless_cooling_rates_vanish() {
    let n = 5000;
    let v = sample_maxwellian(Vec2::ZERO, 1.0, n, 9).unwrap();
    let e = ParticleEnsemble::new(annulus_positions(n, 1.0, 2.0, 9), v, vec![1.0; n], 9).unwrap();
    let cells = RadialCells::uniform(1.0, 2.0, 4).unwrap();
    let field = compute_moments(&e, &cells, Frame::Polar);
    let (_, elastic) = dsmc_collide(&e, &params(1.0, 2e-3, 0.05), 0.01, 9, 0).unwrap();
    assert!(elastic.collisions > 0);
    assert_eq!(elastic.energy_dissipated, 0.0);
    assert!(estimate_cooling_rate(&elastic, &field).iter().all(|z| *z == Some(0.0)));
    let (after, none) = dsmc_collide(&e, &params(0.5, 0.0, 0.05), 0.01, 9, 0).unwrap();
    assert_eq!(none.collisions, 0);
    assert_eq!(after, e);
    assert!(estimate_cooling_rate(&none, &field).iter().all(|z| *z == Some(0.0)));
}

#[test]
fn elastic_periodic_box_is_stationary() {
    let side = 1.0;
    let mut e = gas(2000, side, 1.0, 10);
    let p = params(1.0, 2e-3, 0.1);
    let ke0 = e.kinetic_energy();
    let probe = RadialCells::uniform(0.0, 0.5, 1).unwrap();
    let (mut times, mut temps) = (Vec::new(), Vec::new());
    let dt = 1e-3;
    for step in 0..10_000u64 {
        stream_periodic(&mut e, dt, side);
        e = dsmc_collide(&e, &p, dt, 10, step).unwrap().0;
        times.push(step as f64 * dt);
        temps.push(compute_moments(&e, &probe, Frame::Cartesian).moments[0].t);
    }
    assert!((e.kinetic_energy() / ke0 - 1.0).abs() < 1e-12);
    let (slope, se) = block_bootstrap_slope(&times, &temps, 200, 400, &mut stream(10, &[])).unwrap();
    assert!(slope.abs() < 3.0 * se, "{slope} ± {se}");
}

fn snapshot(e: &ParticleEnsemble, cells: &RadialCells, t: f64) -> MomentField {
    let mut f = compute_moments(e, cells, Frame::Polar);
    f.time = t;
    f
}

/// Free streaming of a uniform disc of gas, snapshots every `dt`.
fn free_stream_continuity(n: usize, seed: u64) -> f64 {
    let pos = annulus_positions(n, 0.0, 3.0, seed);
    let vel = sample_maxwellian(Vec2::ZERO, 0.01, n, seed).unwrap();
    let mut e = ParticleEnsemble::new(pos, vel, vec![1.0 / n as f64; n], seed).unwrap();
    let cells = RadialCells::uniform(1.0, 2.0, 10).unwrap();
    let dt = 0.05;
    let mut snaps = vec![snapshot(&e, &cells, 0.0)];
    for k in 1..6 {
        for (x, v) in e.positions.iter_mut().zip(&e.velocities) {
            *x += *v * dt;
        }
        snaps.push(snapshot(&e, &cells, k as f64 * dt));
    }
    moment_residuals(&snaps, &NoField, None).unwrap().continuity
}

#[test]
fn continuity_residual_falls_at_the_monte_carlo_rate() {
    let mean = |n: usize| (0..4).map(|s| free_stream_continuity(n, 30 + s)).sum::<f64>() / 4.0;
    let ratio = mean(25_000) / mean(100_000);
    assert!((1.0..=4.0).contains(&ratio), "{ratio}");
}

#[test]
fn static_gas_has_exactly_zero_residuals() {
    let n = 4000;
    let e = ParticleEnsemble::new(annulus_positions(n, 1.0, 2.0, 3), vec![Vec2::ZERO; n], vec![1.0; n], 3).unwrap();
    let cells = RadialCells::uniform(1.0, 2.0, 8).unwrap();
    let snaps: Vec<MomentField> = (0..4).map(|k| snapshot(&e, &cells, 0.1 * k as f64)).collect();
    let r = moment_residuals(&snaps, &NoField, None).unwrap();
    assert_eq!([r.continuity, r.momentum_r, r.momentum_phi, r.heat], [0.0; 4]);
}

#[test]
fn cold_rotating_ring_sits_at_the_bootstrap_floor() {
    let model = RingModel::uniform(1.0, 1.0, 2.0, 0.02).unwrap();
    let mf = MeanField::from_density(&model.density, 1e-11).unwrap();
    let net = |r: f64| -1.0 / (r * r) + mf.force(r);
    let n = 40_000;
    let pos = annulus_positions(n, 1.0, 2.0, 4);
    let vel = pos.iter().map(|x| x.perp() * ((-net(x.norm()) / x.norm()).sqrt() / x.norm())).collect();
    let mut e = ParticleEnsemble::new(pos, vel, vec![0.02 / n as f64; n], 4).unwrap();
    let forces = ForceModel::new(&model, mf.clone(), false);
    let cells = RadialCells::uniform(1.1, 1.9, 16).unwrap();
    let dt = 0.01;
    let mut series = vec![(0.0, e.clone())];
    for k in 1..=40 {
        e = step_ensemble(&e, &forces, (k - 1) as f64 * dt, dt, Default::default(), Bounds::unbounded()).unwrap().0;
        if k % 10 == 0 {
            series.push((k as f64 * dt, e.clone()));
        }
    }
    let snaps: Vec<MomentField> = series.iter().map(|(t, e)| snapshot(e, &cells, *t)).collect();
    let r = moment_residuals(&snaps, &net, None).unwrap();
    let floor = residual_bootstrap_floor(&series, &cells, &net, 50, 4).unwrap();
    assert!(r.momentum_r < 3.0 * floor.momentum_r, "{} vs {}", r.momentum_r, floor.momentum_r);
    assert!(r.momentum_phi < 3.0 * floor.momentum_phi.max(1e-15), "{} vs {}", r.momentum_phi, floor.momentum_phi);
}

#[test]
fn thin_shell_fluxes_balance() {
    let n = 200_000;
    let pos = annulus_positions(n, 1.0, 2.0, 12);
    let vel = sample_maxwellian(Vec2::ZERO, 1e-4, n, 12).unwrap();
    let e = ParticleEnsemble::new(pos, vel, vec![1.0 / n as f64; n], 12).unwrap();
    let field = compute_moments(&e, &RadialCells::uniform(1.0, 2.0, 50).unwrap(), Frame::Polar);
    let shell = RingModel::uniform(1.0, 1.46, 1.54, 0.01).unwrap();
    let f = edge_flux_diagnostic(&field, &shell, &[0.01]).unwrap()[0];
    let (ri, ro) = (1.47, 1.53);
    // Both circles sit on cell centres. Per unit length the fluxes differ
    // only by the sampling noise of ρ P_rr, relative variance 3/n per cell.
    let m = field.moments[23];
    let se = m.rho * m.p.xx * (6.0 / m.count as f64).sqrt();
    let gap = f.inner / (2.0 * PI * ri) - f.outer / (2.0 * PI * ro);
    assert!(gap.abs() < 5.0 * se, "{gap} vs {se}");
}

fn warm_ring(particles: usize, seed: u64) -> ScenarioConfig {
    let model = RingModel::uniform(1.0, 1.0, 2.0, 0.1).unwrap();
    let mut integ = IntegratorConfig::new(0.01, 0.5);
    integ.frozen_density = true;
    let mut c = ScenarioConfig::new("warm", model, particles, integ);
    c.seed = Some(seed);
    c.features.collisions = true;
    c.kinetic.radial_cells = 80;
    c.kinetic.snapshot_every = 10;
    c
}

#[test]
fn warm_ring_edge_flux_grows_toward_the_edges() {
    let run = run_model_b(&warm_ring(40_000, 2)).unwrap();
    let net: Vec<f64> = run.edge_flux.iter().map(|f| f.net).collect();
    assert_eq!(run.edge_flux.len(), 4);
    assert!(net.windows(2).all(|w| w[0] > w[1]), "{net:?}");
    assert_eq!(run.snapshots.len(), 6);
    assert_eq!(run.ledger.len(), 50);
    assert!(run.ledger.iter().all(|(_, s)| s.energy_dissipated >= 0.0 && s.events.is_empty()));
}

#[test]
fn model_b_is_reproducible() {
    let mut c = warm_ring(3000, 5);
    c.integrator.duration = 0.1;
    c.kinetic.snapshot_every = 2;
    let a = run_model_b(&c).unwrap();
    let b = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap().install(|| run_model_b(&c).unwrap());
    assert_eq!(format!("{a:?}"), format!("{b:?}"));
    c.integrator.duration = 0.01;
    assert!(matches!(run_model_b(&c), Err(Error::InsufficientData(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn binary_collisions_conserve_momentum_and_never_heat(
        v1x in -2.0f64..2.0, v1y in -2.0f64..2.0, v2x in -2.0f64..2.0, v2y in -2.0f64..2.0,
        m1 in 0.1f64..10.0, m2 in 0.1f64..10.0, e in 0.0f64..=1.0, phi in 0.0f64..(2.0 * PI),
    ) {
        let (v1, v2) = (Vec2::new(v1x, v1y), Vec2::new(v2x, v2y));
        let n = Vec2::from_polar(1.0, phi);
        let (a, b, loss) = binary_collision(v1, v2, m1, m2, e, n);
        let p0 = v1 * m1 + v2 * m2;
        let scale = m1 * v1.norm() + m2 * v2.norm() + 1e-300;
        prop_assert!(((a * m1 + b * m2) - p0).norm() < 4.0 * f64::EPSILON * scale);
        prop_assert!(loss >= 0.0);
        let direct = kinetic_energy(&[v1, v2], &[m1, m2]) - kinetic_energy(&[a, b], &[m1, m2]);
        prop_assert!((direct - loss).abs() < 1e-13 * kinetic_energy(&[v1, v2], &[m1, m2]).max(1e-300));
        if (v1 - v2).dot(n) > 0.0 {
            prop_assert!(((a - b).dot(n) + e * (v1 - v2).dot(n)).abs() < 1e-13 * (v1 - v2).norm());
        }
    }

    #[test]
    fn dsmc_never_heats_and_keeps_masses(seed in 0u64..1000, e in 0.0f64..=1.0) {
        let g = gas(500, 0.5, 1.0, seed);
        let (next, s) = dsmc_collide(&g, &params(e, 5e-3, 0.05), 0.02, seed, 1).unwrap();
        prop_assert!(next.kinetic_energy() <= g.kinetic_energy() * (1.0 + 1e-14));
        prop_assert_eq!(&next.masses, &g.masses);
        prop_assert!(s.momentum_residual < 1e-13 * g.len() as f64);
    }
}
