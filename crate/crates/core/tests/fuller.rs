use std::time::Instant;

use proptest::prelude::*;
use ringlab_core::fuller::*;

fn synthesis() -> FullerSynthesis {
    FullerSynthesis::calibrated(1e-12).unwrap()
}

/// Exact self-similar constant, C² = (√33 - 1) / 24.
fn c_exact() -> f64 {
    ((33f64.sqrt() - 1.0) / 24.0).sqrt()
}

#[test]
fn calibration_is_stable_under_tolerance_halving() {
    for tol in [1e-6, 1e-8, 1e-10] {
        let a = calibrate_fuller_constant(tol).unwrap();
        let b = calibrate_fuller_constant(0.5 * tol).unwrap();
        assert!((a - b).abs() < 5e-5 * a, "tol {tol}: {a} vs {b}");
        assert!((b - c_exact()).abs() < 10.0 * tol);
    }
}

#[test]
fn shooting_and_value_iteration_agree_to_three_digits() {
    let start = Instant::now();
    let shoot = calibrate_fuller_constant(1e-14).unwrap();
    let vi = value_iteration_constant(&ValueIteration::default()).unwrap();
    assert!((shoot - vi).abs() < 5e-4 * shoot, "shooting {shoot}, value iteration {vi}");
    eprintln!("value iteration C = {vi} in {:?}", start.elapsed());
}

#[test]
fn value_iteration_converges_with_refinement() {
    let exact = c_exact();
    let coarse = value_iteration_constant(&ValueIteration { grid: 2_000, step: 4e-3, ..Default::default() }).unwrap();
    let fine = value_iteration_constant(&ValueIteration { grid: 8_000, step: 1e-3, ..Default::default() }).unwrap();
    assert!((fine - exact).abs() < (coarse - exact).abs());
}

#[test]
fn chattering_from_unit_offset() {
    let tr = simulate_fuller(1.0, 0.0, &synthesis(), 1e-6, 100.0).unwrap();
    assert_eq!(tr.termination, Termination::ReachedBall);
    assert!(tr.switch_count() >= 8, "{} switches", tr.switch_count());
    let r = tr.tail_switch_ratio(6).unwrap();
    assert!(r.dispersion < 0.01, "{r:?}");
    let k = calibrate_self_similar_arc(1.0, 1e-15).unwrap().contraction;
    assert!((r.mean - k).abs() < 1e-6 * k, "{} vs {k}", r.mean);
}

#[test]
fn intervals_shrink_after_first_switch() {
    for &(x, y) in &[(1.0, 0.0), (-0.3, 2.0), (0.05, -0.9), (4.0, 1.0)] {
        let tr = simulate_fuller(x, y, &synthesis(), 1e-8, 1e3).unwrap();
        let iv: Vec<f64> = tr.switch_times.windows(2).map(|w| w[1] - w[0]).collect();
        assert!(iv.windows(2).all(|w| w[1] < w[0]), "from ({x}, {y})");
    }
}

#[test]
fn time_and_state_scaling_law() {
    let s = synthesis();
    let (x0, y0) = (0.7, -0.4);
    let base = simulate_fuller(x0, y0, &s, 1e-9, 100.0).unwrap();
    for lam in [0.5, 2.0] {
        let sc = simulate_fuller(lam * lam * x0, lam * y0, &s, 1e-9, 100.0).unwrap();
        let n = base.switch_count().min(sc.switch_count()) - 1;
        assert!(n >= 8);
        for k in 0..n {
            let t = lam * base.switch_times[k];
            assert!((sc.switch_times[k] - t).abs() <= 10.0 * s.event_tol * t, "λ={lam}, switch {k}");
            let (xb, yb) = base.states[k + 1];
            let (xs, ys) = sc.states[k + 1];
            assert!((xs - lam * lam * xb).abs() <= 10.0 * s.event_tol * (lam * lam * x0.abs()));
            assert!((ys - lam * yb).abs() <= 10.0 * s.event_tol * (lam * y0.abs().max(x0.abs().sqrt())));
        }
        let ratio = sc.cost / (lam.powi(5) * base.cost);
        assert!((ratio - 1.0).abs() < 1e-3, "λ={lam}: {ratio}");
    }
}

#[test]
fn reconstruction_is_exact_at_arc_endpoints() {
    let tr = simulate_fuller(1.0, 0.0, &synthesis(), 1e-10, 100.0).unwrap();
    assert!(tr.reconstruction_residual() < 1e-12);
}

#[test]
fn table_has_one_row_per_switch() {
    let tr = simulate_fuller(1.0, 0.0, &synthesis(), 1e-6, 100.0).unwrap();
    let t = tr.to_table();
    assert_eq!(t.len(), tr.switch_count());
    assert!(tr.summary_line().contains(&format!("switches = {}", tr.switch_count())));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn control_is_odd(x in -5.0f64..5.0, y in -5.0f64..5.0) {
        let s = synthesis();
        prop_assume!(x.abs() > 1e-9 || y.abs() > 1e-9);
        let a = fuller_control((x, y), &s).value().unwrap();
        let b = fuller_control((-x, -y), &s).value().unwrap();
        prop_assert_eq!(a, -b);
    }

    #[test]
    fn trajectories_are_centrally_symmetric(x in -3.0f64..3.0, y in -3.0f64..3.0) {
        prop_assume!(x.hypot(y) > 1e-3);
        let s = synthesis();
        let a = simulate_fuller(x, y, &s, 1e-7, 100.0).unwrap();
        let b = simulate_fuller(-x, -y, &s, 1e-7, 100.0).unwrap();
        prop_assert_eq!(&a.times, &b.times);
        for (p, q) in a.states.iter().zip(&b.states) {
            prop_assert_eq!(p.0, -q.0);
            prop_assert_eq!(p.1, -q.1);
        }
        prop_assert_eq!(a.cost, b.cost);
    }

    #[test]
    fn cost_is_homogeneous_of_degree_five(x in -2.0f64..2.0, y in -2.0f64..2.0, big in any::<bool>()) {
        prop_assume!(x.hypot(y) > 0.05);
        let lam: f64 = if big { 2.0 } else { 0.5 };
        let s = synthesis();
        let a = simulate_fuller(x, y, &s, 1e-8, 1e3).unwrap();
        let b = simulate_fuller(lam * lam * x, lam * y, &s, 1e-8, 1e3).unwrap();
        prop_assert!((b.cost / (lam.powi(5) * a.cost) - 1.0).abs() < 1e-3);
    }

    #[test]
    fn cost_never_decreases(x in -3.0f64..3.0, y in -3.0f64..3.0) {
        prop_assume!(x.hypot(y) > 1e-3);
        let tr = simulate_fuller(x, y, &synthesis(), 1e-7, 100.0).unwrap();
        prop_assert!(tr.costs.windows(2).all(|w| w[1] >= w[0]));
        prop_assert!(tr.switch_times.windows(2).all(|w| w[1] > w[0]));
    }
}
