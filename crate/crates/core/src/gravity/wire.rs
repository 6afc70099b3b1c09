//! Attraction of a uniform circular wire on a point in its plane.
//!
//! With `k' = |a - R| / (a + R)` the radial force per unit linear density is
//!
//! ```text
//! W(a, R) = (2a / R) [ E(k) / (a - R) - K(k) / (a + R) ]
//! ```
//!
//! and the potential is `-4 a K(k) / (a + R)`. Both complete integrals come
//! from one AGM run.

use std::f64::consts::PI;

use crate::elliptic::complete_k_e;
use crate::error::{Error, Result};
use crate::model::Constants;
use crate::vec2::Vec2;

/// Below this ratio `R / a` the closed form loses digits to cancellation and
/// the Legendre series is used instead.
const SERIES_RATIO: f64 = 0.05;
const SERIES_TERMS: usize = 12;

/// Radial force (positive outward) at in-plane distance `r_eval` from the
/// centre of a circle of radius `a` with unit linear density.
pub fn wire_kernel(a: f64, r_eval: f64) -> f64 {
    if r_eval == 0.0 || a == 0.0 {
        return 0.0;
    }
    if r_eval < SERIES_RATIO * a {
        // W = 2π Σ 2n c_n R^(2n-1) / a^(2n), c_n = ((2n-1)!! / (2n)!!)^2
        let q = r_eval / a;
        let q2 = q * q;
        let mut coef = 1.0_f64;
        let mut pow = q / a;
        let mut sum = 0.0;
        for n in 1..=SERIES_TERMS {
            coef *= (2 * n - 1) as f64 / (2 * n) as f64;
            sum += 2.0 * n as f64 * coef * coef * pow;
            pow *= q2;
        }
        return Constants::G * 2.0 * PI * sum;
    }
    let s = a + r_eval;
    let kp = (a - r_eval).abs() / s;
    let (k, e) = complete_k_e(kp);
    Constants::G * (2.0 * a / r_eval) * (e / (a - r_eval) - k / s)
}

/// Potential at in-plane distance `r_eval` of a circle of radius `a` with
/// unit linear density.
pub fn wire_potential_kernel(a: f64, r_eval: f64) -> f64 {
    if a == 0.0 {
        return 0.0;
    }
    let s = a + r_eval;
    let kp = (a - r_eval).abs() / s;
    let (k, _) = complete_k_e(kp);
    -Constants::G * 4.0 * a * k / s
}

/// Force per unit mass on `p` from a uniform circle of linear density
/// `linear_density` and radius `circle_radius` centred at the origin.
pub fn ring_wire_force_agm(linear_density: f64, circle_radius: f64, p: Vec2) -> Result<Vec2> {
    let r = p.norm();
    if r == 0.0 {
        return Ok(Vec2::ZERO);
    }
    if (r - circle_radius).abs() <= 1e-14 * circle_radius {
        return Err(Error::Singular(format!("point at distance {r} lies on the wire of radius {circle_radius}")));
    }
    let f = linear_density * wire_kernel(circle_radius, r);
    Ok(p * (f / r))
}
