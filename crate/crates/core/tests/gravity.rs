use std::f64::consts::PI;

use proptest::prelude::*;
use ringlab_core::config::EdgeSide;
use ringlab_core::dynamics::total_force;
use ringlab_core::gravity::*;
use ringlab_core::{DensityProfile, RingModel, Vec2};

fn unit_annulus() -> DensityProfile {
    DensityProfile::uniform(1.0, 2.0, 1.0).unwrap()
}

/// Midpoint sum of the planar Newtonian kernel over the annulus in polar
/// coordinates, for a point off the support.
fn riemann_force(r_eval: f64, nr: usize, nth: usize) -> f64 {
    let (r1, r2) = (1.0, 2.0);
    let hr = (r2 - r1) / nr as f64;
    let ht = 2.0 * PI / nth as f64;
    let mut total = 0.0;
    for i in 0..nr {
        let r = r1 + (i as f64 + 0.5) * hr;
        let mut ring = 0.0;
        for j in 0..nth {
            let th = (j as f64 + 0.5) * ht;
            let (dx, dy) = (r * th.cos() - r_eval, r * th.sin());
            ring += dx / (dx * dx + dy * dy).powf(1.5);
        }
        total += r * ring;
    }
    total * hr * ht
}

#[test]
fn annulus_force_in_the_hole_matches_riemann_oracle() {
    // Midpoint error is even in h; two Richardson levels remove h² and h⁴.
    let f = |n| riemann_force(0.5, n, 256);
    let (a, b, c) = (f(100), f(200), f(400));
    let ab = (4.0 * b - a) / 3.0;
    let bc = (4.0 * c - b) / 3.0;
    let oracle = (16.0 * bc - ab) / 15.0;
    let got = annulus_radial_force(&unit_annulus(), 0.5, 1e-12).unwrap();
    assert!(got > 0.0);
    assert!(((got - oracle) / oracle).abs() < 1e-8, "{got} vs {oracle}");
}

#[test]
fn centre_feels_no_ring_force() {
    assert_eq!(annulus_radial_force(&unit_annulus(), 0.0, 1e-10).unwrap(), 0.0);
}

/// Gauss–Legendre 15-point rule on `[a, b]`.
fn gl15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    const X: [f64; 8] = [
        0.0,
        0.201_194_093_997_434_5,
        0.394_151_347_077_563_4,
        0.570_972_172_608_538_8,
        0.724_417_731_360_170_1,
        0.848_206_583_410_427_2,
        0.937_273_392_400_706,
        0.987_992_518_020_485_4,
    ];
    const W: [f64; 8] = [
        0.202_578_241_925_561_3,
        0.198_431_485_327_111_6,
        0.186_161_000_015_562_2,
        0.166_269_205_816_994,
        0.139_570_677_926_154_3,
        0.107_159_220_467_172,
        0.070_366_047_488_108_1,
        0.030_753_241_996_117_3,
    ];
    let (m, h) = (0.5 * (a + b), 0.5 * (b - a));
    let mut s = W[0] * f(m);
    for k in 1..8 {
        s += W[k] * (f(m - h * X[k]) + f(m + h * X[k]));
    }
    s * h
}

/// Adaptive bisection with a 15-point rule compared against its halves.
fn adaptive(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, whole: f64, depth: usize) -> f64 {
    let m = 0.5 * (a + b);
    let (l, r) = (gl15(f, a, m), gl15(f, m, b));
    let change = (l + r - whole).abs();
    if change <= tol || change <= 1e-15 * (l.abs() + r.abs()) || depth == 0 {
        return l + r;
    }
    adaptive(f, a, m, 0.5 * tol, l, depth - 1) + adaptive(f, m, b, 0.5 * tol, r, depth - 1)
}

/// Radial pull of a unit-density circle by direct angular quadrature, with
/// distances written to avoid cancellation near the wire.
fn wire_oracle(a: f64, r: f64) -> f64 {
    let d = a - r;
    let f = |th: f64| {
        let s = (0.5 * th).sin();
        let s2 = s * s;
        let dist2 = d * d + 4.0 * a * r * s2;
        a * (d - 2.0 * a * s2) / (dist2 * dist2.sqrt())
    };
    // Symmetric about θ = 0; split where the peak ends.
    let w = (d.abs() / a).max(1e-12);
    let mut breaks = vec![0.0];
    let mut x = w;
    while x < PI {
        breaks.push(x);
        x *= 4.0;
    }
    breaks.push(PI);
    let mut total = 0.0;
    for p in breaks.windows(2) {
        let g = gl15(&f, p[0], p[1]);
        total += adaptive(&f, p[0], p[1], 1e-14 / d.abs(), g, 50);
    }
    2.0 * total
}

#[test]
fn wire_force_matches_angular_quadrature() {
    let a = 1.0;
    let mut worst: f64 = 0.0;
    for k in 0..=20 {
        let rel = 10f64.powf(-6.0 + 5.0 * k as f64 / 20.0);
        for r in [a * (1.0 - rel), a * (1.0 + rel)] {
            let got = ring_wire_force_agm(1.0, a, Vec2::new(r, 0.0)).unwrap().x;
            let want = wire_oracle(a, r);
            worst = worst.max(((got - want) / want).abs());
        }
    }
    assert!(worst < 1e-10, "worst relative error {worst:e}");
}

#[test]
fn wire_force_reference_point() {
    let got = ring_wire_force_agm(1.0, 1.0, Vec2::new(0.99, 0.0)).unwrap().x;
    let want = wire_oracle(1.0, 0.99);
    assert!(((got - want) / want).abs() < 1e-10);
}

/// Straight-edge strip of half-length `a` and depth `b`, unit density, at
/// distance `eps` from the edge on its midline.
fn strip_force(eps: f64, a: f64, b: f64) -> f64 {
    2.0 * ((a / eps).asinh() - (a / (eps + b)).asinh())
}

#[test]
fn strip_oracle_slope_tends_to_two() {
    let eps: Vec<f64> = (0..7).map(|i| 10f64.powf(-9.0 + 0.5 * i as f64)).collect();
    let f: Vec<f64> = eps.iter().map(|&e| strip_force(e, 1.0, 1.0)).collect();
    let (slope, _, r2) = log_slope_fit(&eps, &f).unwrap();
    assert!((slope - 2.0).abs() < 1e-5, "{slope}");
    assert!(r2 > 0.999_999);
}

#[test]
fn edge_increments_per_decade_match_strip_coefficient() {
    let d = unit_annulus();
    for side in [-1.0, 1.0] {
        let edge = if side < 0.0 { 1.0 } else { 2.0 };
        let f: Vec<f64> = [1e-3, 1e-4, 1e-5]
            .iter()
            .map(|&e| annulus_radial_force(&d, edge + side * e, 1e-12).unwrap().abs())
            .collect();
        for w in f.windows(2) {
            let inc = w[1] - w[0];
            let want = 2.0 * 10f64.ln();
            assert!((inc - want).abs() < 0.05 * want, "edge {edge}: {inc} vs {want}");
        }
    }
}

#[test]
fn edge_fit_on_unit_annulus() {
    let eps: Vec<f64> = (0..7).map(|i| 10f64.powf(-6.0 + 0.5 * i as f64)).collect();
    for side in [EdgeSide::Inner, EdgeSide::Outer] {
        let fit = edge_asymptotics_fit(&unit_annulus(), side, &eps, 1e-11).unwrap();
        assert!(fit.r_squared > 0.999, "{side:?}: r² {}", fit.r_squared);
        assert!((fit.slope - 2.0).abs() < 0.1, "{side:?}: slope {}", fit.slope);
        let doubled = edge_asymptotics_fit(&unit_annulus().scaled(2.0), side, &eps, 1e-11).unwrap();
        assert!((doubled.slope - 2.0 * fit.slope).abs() < 1e-9 * fit.slope);
    }
}

fn heavy_ring() -> RingModel {
    RingModel::uniform(1.0, 1.0, 2.0, 2.0).unwrap()
}

/// Roots of the directly evaluated net force by a fine scan and bisection.
fn scan_roots(model: &RingModel, lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let f = |r: f64| saturn_radial(model, r).unwrap() + annulus_radial_force(&model.density, r, 1e-12).unwrap();
    let xs: Vec<f64> = (0..=n).map(|i| lo + (hi - lo) * (i as f64 + 0.37) / n as f64).collect();
    let mut roots = Vec::new();
    for w in xs.windows(2) {
        let (mut a, mut b) = (w[0], w[1]);
        let (fa, fb) = (f(a), f(b));
        let crosses_edge = [model.inner_radius, model.outer_radius].iter().any(|&e| a < e && e < b);
        if fa * fb < 0.0 && !crosses_edge {
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if m <= a || m >= b {
                    break;
                }
                if f(m) * fa > 0.0 {
                    a = m;
                } else {
                    b = m;
                }
            }
            roots.push(0.5 * (a + b));
        }
    }
    roots
}

#[test]
fn heavy_ring_librations_match_scan_oracle() {
    let m = heavy_ring();
    let grid: Vec<f64> = (0..200).map(|i| 0.3 + 3.7 * i as f64 / 199.0).collect();
    let p = net_radial_profile(&m, &grid, 1e-11).unwrap();
    let oracle = scan_roots(&m, 0.3, 4.0, 4000);
    assert_eq!(p.roots.len(), 2, "{:?}", p.roots);
    assert_eq!(oracle.len(), 2, "{oracle:?}");
    for (got, want) in p.roots.iter().zip(&oracle) {
        assert!((got.radius - want).abs() < 1e-8, "{} vs {want}", got.radius);
        let f = p.evaluate(got.radius).unwrap();
        assert!(f.abs() < 10.0 * p.quad_tolerance * f.abs().max(1.0));
    }
    assert!(p.roots[0].radius < 1.0 && p.roots[0].stability == Stability::Unstable);
    assert!(p.roots[1].radius > 1.0 && p.roots[1].radius < 2.0 && p.roots[1].stability == Stability::Stable);
}

#[test]
fn heavy_ring_sign_pattern() {
    let m = heavy_ring();
    let grid: Vec<f64> = (0..400).map(|i| 0.2 + 3.8 * (i as f64 + 0.5) / 400.0).collect();
    let p = net_radial_profile(&m, &grid, 1e-10).unwrap();
    let sign = |lo: f64, hi: f64| -> Vec<bool> {
        p.radii.iter().zip(&p.net_force).filter(|(r, _)| **r > lo && **r < hi).map(|(_, f)| *f > 0.0).collect()
    };
    let hole = sign(0.0, 1.0);
    assert!(!hole[0] && *hole.last().unwrap());
    let ring = sign(1.0, 2.0);
    assert!(ring[0] && !*ring.last().unwrap());
    assert!(sign(2.0, 10.0).iter().all(|s| !s));
    assert!(p.net_force.last().unwrap().abs() < 0.3);
}

#[test]
fn light_ring_outward_force_is_confined_below_double_resolution() {
    // Outward force needs 2σ ln(1/ε) > M/R², i.e. ε ~ exp(-M/(2σR²)).
    let m = RingModel::uniform(1.0, 1.0, 2.0, 0.02).unwrap();
    let sigma = m.density.eval(1.5);
    assert!((-1.0 / (2.0 * sigma * 4.0)).exp() < 1e-16);
    for r in [1.0 - 1e-15, 1.0 + 1e-15, 2.0 - 4e-15, 2.0 + 4e-15] {
        let f = saturn_radial(&m, r).unwrap() + annulus_radial_force(&m.density, r, 1e-10).unwrap();
        assert!(f < 0.0, "R = {r}: {f}");
    }
}

#[test]
fn planet_only_profile_and_roots() {
    let m = RingModel::new(1.0, 1.0, 2.0, DensityProfile::zero()).unwrap();
    let grid: Vec<f64> = (1..50).map(|i| 0.1 * i as f64).collect();
    let p = net_radial_profile(&m, &grid, 1e-10).unwrap();
    for (r, f) in p.radii.iter().zip(&p.net_force) {
        assert_eq!(*f, -1.0 / (r * r));
    }
    assert!(p.roots.is_empty());
    assert!(find_librations(&p, 1e-10).unwrap().is_empty());
}

#[test]
fn profile_is_the_sum_of_its_parts() {
    let p = net_radial_profile(&heavy_ring(), &[0.5, 0.9, 1.4, 2.5], 1e-10).unwrap();
    for i in 0..4 {
        assert_eq!(p.net_force[i], p.saturn_force[i] + p.ring_force[i]);
    }
}

#[test]
fn edge_grid_points_are_nudged_with_a_warning() {
    let p = net_radial_profile(&heavy_ring(), &[0.5, 1.0, 1.5, 2.0, 2.5], 1e-10).unwrap();
    assert_eq!(p.warnings.len(), 2);
    assert!(p.radii[1] != 1.0 && p.radii[3] != 2.0);
}

#[test]
fn planet_force_examples() {
    let m = RingModel::uniform(1.0, 1.0, 2.0, 0.02).unwrap();
    assert_eq!(saturn_force(&m, Vec2::new(1.0, 0.0)).unwrap(), Vec2::new(-1.0, 0.0));
    assert_eq!(saturn_force(&m, Vec2::new(-1.0, 0.0)).unwrap(), Vec2::new(1.0, 0.0));
    let m4 = RingModel::uniform(4.0, 1.0, 2.0, 0.02).unwrap();
    assert_eq!(saturn_force(&m4, Vec2::new(0.0, 2.0)).unwrap(), Vec2::new(0.0, -1.0));
    assert!(saturn_force(&m, Vec2::ZERO).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn ring_force_is_radial(r in 0.2f64..3.5, phi in 0.0f64..(2.0 * PI)) {
        let m = heavy_ring();
        prop_assume!((r - 1.0).abs() > 1e-6 && (r - 2.0).abs() > 1e-6);
        let x = Vec2::from_polar(r, phi);
        let f = total_force(&m, &m.density, 0.0, x, 1e-10).unwrap();
        let tangential = f.cross(x) / r;
        let radial = f.dot(x) / r;
        prop_assert!(tangential.abs() <= 1e-10 * radial.abs());
    }

    #[test]
    fn forces_are_linear_in_mass(r in 0.2f64..3.5, lam in 0.1f64..10.0) {
        let m = heavy_ring();
        prop_assume!((r - 1.0).abs() > 1e-6 && (r - 2.0).abs() > 1e-6);
        let s = m.with_masses_scaled(lam);
        let a = net_radial_profile(&m, &[r, r + 1e-3], 1e-10).unwrap();
        let b = net_radial_profile(&s, &[r, r + 1e-3], 1e-10).unwrap();
        for i in 0..2 {
            prop_assert!((b.net_force[i] - lam * a.net_force[i]).abs() <= 1e-13 * (lam * a.net_force[i]).abs().max(1e-300));
        }
    }

    #[test]
    fn doubling_the_budget_stays_within_reported_error(r in 0.3f64..3.0) {
        let d = unit_annulus();
        prop_assume!((r - 1.0).abs() > 1e-6 && (r - 2.0).abs() > 1e-6);
        let (coarse, err) = annulus_radial_force_with_error(&d, r, 1e-8).unwrap();
        let fine = annulus_radial_force(&d, r, 1e-12).unwrap();
        prop_assert!((coarse - fine).abs() <= err.max(1e-8 * fine.abs()));
    }
}
