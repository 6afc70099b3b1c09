//! Self-gravity of a flat axisymmetric annulus.
//!
//! The angular integral is done in closed form (the circle kernel of
//! [`super::wire`]); the radial integral is adaptive Gauss–Kronrod over the
//! density knots. On every linear piece the pole `2 σ(c) / (r - R)` is
//! subtracted, with `c` the point of the piece closest to `R`, and added back
//! analytically as a logarithm. What is left is bounded up to an integrable
//! logarithm, so evaluation points inside the support (principal value) and
//! a hair outside a sharp edge both converge.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::{Constants, DensityProfile};
use crate::quadrature::{integrate_breaks, QuadOptions};

use super::wire::{wire_kernel, wire_potential_kernel};

fn options(density: &DensityProfile, tol: f64) -> QuadOptions {
    let sigma_max = density.values.iter().cloned().fold(0.0, f64::max);
    QuadOptions::relative(tol).with_abs_tol(tol * 2.0 * PI * Constants::G * sigma_max).with_max_evals(2_000_000)
}

fn breaks_with(density: &DensityProfile, r_eval: f64) -> Vec<f64> {
    let mut b = density.knots.clone();
    if let Some((lo, hi)) = density.support() {
        if r_eval > lo && r_eval < hi && !b.contains(&r_eval) {
            let i = b.partition_point(|k| *k < r_eval);
            b.insert(i, r_eval);
        }
    }
    b
}

/// Radial force per unit mass (positive outward) at radius `r_eval`.
pub fn annulus_radial_force(density: &DensityProfile, r_eval: f64, tol: f64) -> Result<f64> {
    Ok(annulus_radial_force_with_error(density, r_eval, tol)?.0)
}

/// As [`annulus_radial_force`], also returning the quadrature error estimate.
pub fn annulus_radial_force_with_error(density: &DensityProfile, r_eval: f64, tol: f64) -> Result<(f64, f64)> {
    if !(r_eval >= 0.0) || !r_eval.is_finite() {
        return Err(Error::Domain(format!("evaluation radius must be finite and >= 0, got {r_eval}")));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    if r_eval == 0.0 || density.is_zero() || density.knots.len() < 2 {
        return Ok((0.0, 0.0));
    }
    let knots = &density.knots;
    let values = &density.values;
    // σ at the point of piece `i` closest to r_eval.
    let anchor = |i: usize| -> f64 {
        let (a, b) = (knots[i], knots[i + 1]);
        let c = r_eval.clamp(a, b);
        let t = (c - a) / (b - a);
        values[i] + t * (values[i + 1] - values[i])
    };

    let mut log_part = 0.0;
    let mut pole_at_zero = 0.0;
    for i in 0..knots.len() - 1 {
        let s = anchor(i);
        if s == 0.0 {
            continue;
        }
        for (end, sign) in [(knots[i + 1], 1.0), (knots[i], -1.0)] {
            let d = (end - r_eval).abs();
            if d == 0.0 {
                pole_at_zero += sign * s;
            } else {
                log_part += sign * 2.0 * s * d.ln();
            }
        }
    }
    let scale = values.iter().cloned().fold(0.0, f64::max);
    if pole_at_zero.abs() > 1e-14 * scale {
        return Err(Error::Singular(format!(
            "R = {r_eval} sits on a density discontinuity; the ring force diverges there"
        )));
    }

    let integrand = |r: f64| -> f64 {
        // Nodes of sub-ulp panels can round onto the evaluation point.
        if r == r_eval {
            return 0.0;
        }
        let i = (knots.partition_point(|k| *k <= r).max(1) - 1).min(knots.len() - 2);
        let sigma = density.eval(r);
        let s = anchor(i);
        let pole = if s != 0.0 { 2.0 * s / (r - r_eval) } else { 0.0 };
        sigma * wire_kernel(r, r_eval) - Constants::G * pole
    };
    let breaks = breaks_with(density, r_eval);
    let q = integrate_breaks(integrand, &breaks, options(density, tol))?;
    Ok((q.value + Constants::G * log_part, q.error))
}

/// Gravitational potential of the annulus at radius `r_eval`.
pub fn annulus_potential(density: &DensityProfile, r_eval: f64, tol: f64) -> Result<f64> {
    if !(r_eval >= 0.0) || !r_eval.is_finite() {
        return Err(Error::Domain(format!("evaluation radius must be finite and >= 0, got {r_eval}")));
    }
    if density.is_zero() || density.knots.len() < 2 {
        return Ok(0.0);
    }
    let breaks = breaks_with(density, r_eval);
    let q = integrate_breaks(
        |r| {
            if r == r_eval {
                0.0
            } else {
                density.eval(r) * wire_potential_kernel(r, r_eval)
            }
        },
        &breaks,
        options(density, tol),
    )?;
    Ok(q.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform() -> DensityProfile {
        DensityProfile::uniform(1.0, 2.0, 1.0).unwrap()
    }

    #[test]
    fn centre_is_zero() {
        assert_eq!(annulus_radial_force(&uniform(), 0.0, 1e-10).unwrap(), 0.0);
    }

    #[test]
    fn on_edge_is_singular() {
        assert!(matches!(annulus_radial_force(&uniform(), 1.0, 1e-10), Err(Error::Singular(_))));
        assert!(matches!(annulus_radial_force(&uniform(), 2.0, 1e-10), Err(Error::Singular(_))));
    }

    #[test]
    fn interior_knot_is_regular() {
        let p = DensityProfile::new(vec![1.0, 1.5, 2.0], vec![1.0, 1.0, 1.0]).unwrap();
        let a = annulus_radial_force(&p, 1.5, 1e-11).unwrap();
        let b = annulus_radial_force(&uniform(), 1.5, 1e-11).unwrap();
        assert!((a - b).abs() < 1e-9, "{a} vs {b}");
    }

    #[test]
    fn far_field_tends_to_point_mass() {
        let p = uniform();
        let r = 200.0;
        let f = annulus_radial_force(&p, r, 1e-11).unwrap();
        let point = -p.mass() / (r * r);
        assert!(((f - point) / point).abs() < 1e-4);
    }

    #[test]
    fn potential_gradient_matches_force() {
        let p = uniform();
        for &r in &[0.5, 1.3, 1.7, 3.0] {
            let h = 1e-5;
            let fd = -(annulus_potential(&p, r + h, 1e-12).unwrap() - annulus_potential(&p, r - h, 1e-12).unwrap())
                / (2.0 * h);
            let f = annulus_radial_force(&p, r, 1e-12).unwrap();
            assert!((fd - f).abs() < 1e-6, "r={r}: {fd} vs {f}");
        }
    }

    #[test]
    fn doubling_budget_stays_within_reported_error() {
        let p = DensityProfile::new(vec![1.0, 1.4, 2.0], vec![0.5, 1.2, 0.8]).unwrap();
        for &r in &[0.7, 1.2, 1.9999, 2.3] {
            let (v, err) = annulus_radial_force_with_error(&p, r, 1e-9).unwrap();
            let (v2, _) = annulus_radial_force_with_error(&p, r, 1e-13).unwrap();
            assert!((v - v2).abs() <= err.max(1e-9 * v.abs()), "r={r}: {v} vs {v2} (err {err})");
        }
    }
}
