//! Complete elliptic integrals through the arithmetic-geometric mean.
//!
//! Both integrals are parametrised by the complementary modulus `k'`, which
//! is what the circle-attraction formulas produce directly as
//! `|a - R| / (a + R)`. Forming `k' = sqrt(1 - k^2)` from `k` would throw
//! away every digit near the wire, exactly where the force is largest.

use std::f64::consts::FRAC_PI_2;

const MAX_ITER: usize = 64;

/// Arithmetic-geometric mean of two non-negative numbers.
pub fn agm(mut a: f64, mut b: f64) -> f64 {
    debug_assert!(a >= 0.0 && b >= 0.0);
    for _ in 0..MAX_ITER {
        if (a - b).abs() <= f64::EPSILON * a {
            break;
        }
        let next = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = next;
    }
    0.5 * (a + b)
}

/// Complete elliptic integrals `(K, E)` for complementary modulus `kp`.
///
/// Runs the Gauss AGM recursion once and accumulates the `c_n` series for
/// `E`, so both values come from a single sequence. Returns `K = +inf`,
/// `E = 1` at `kp = 0`.
pub fn complete_k_e(kp: f64) -> (f64, f64) {
    debug_assert!((0.0..=1.0).contains(&kp), "complementary modulus {kp} out of range");
    if kp == 0.0 {
        return (f64::INFINITY, 1.0);
    }
    // c_0^2 = k^2 = (1 - k')(1 + k'), kept in factored form.
    let c0_sq = (1.0 - kp) * (1.0 + kp);
    let mut a = 1.0_f64;
    let mut b = kp;
    let mut sum = 0.5 * c0_sq;
    let mut weight = 0.5;
    for _ in 0..MAX_ITER {
        let c = 0.5 * (a - b);
        weight *= 2.0;
        sum += weight * c * c;
        if c.abs() <= f64::EPSILON * a {
            break;
        }
        let next = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = next;
    }
    let k = FRAC_PI_2 / (0.5 * (a + b));
    (k, k * (1.0 - sum))
}

/// Complete elliptic integral of the first kind.
pub fn ellip_k(kp: f64) -> f64 {
    complete_k_e(kp).0
}

/// Complete elliptic integral of the second kind.
pub fn ellip_e(kp: f64) -> f64 {
    complete_k_e(kp).1
}
