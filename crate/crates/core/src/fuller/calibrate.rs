//! Two independent routes to the switching coefficient.
//!
//! Shooting: one arc with `u = +b` from the switch state `(C, -1)` must end
//! at `(-k² C, k)` on the opposite branch, and the switching costate
//! `p₂(t) = C²t - Ct² + t³/3 - b t⁴/12` must vanish there.
//!
//! Value iteration: the value is homogeneous, `V(λ²x, λy) = λ⁵ V(x, y)`,
//! so it reduces to a periodic function on the quasi-circle `x² + y⁴ = 1`.
//! A semi-Lagrangian Bellman iteration with exact arcs of length `τ`
//! locates the point where both controls tie.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

use super::trajectory::{arc_cost, arc_state};

const SCAN_POINTS: usize = 400;

/// Self-similar switch-to-switch arc.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SelfSimilarArc {
    pub switch_coefficient: f64,
    /// Contraction `k` of `y` between successive switches.
    pub contraction: f64,
    pub arc_time: f64,
}

/// Switching coefficient at control bound 1, bisected until the arc time
/// is known to relative `tolerance`.
pub fn calibrate_fuller_constant(tolerance: f64) -> Result<f64> {
    Ok(calibrate_self_similar_arc(1.0, tolerance)?.switch_coefficient)
}

/// Shooting solution for control bound `bound`.
pub fn calibrate_self_similar_arc(bound: f64, tolerance: f64) -> Result<SelfSimilarArc> {
    if !(bound > 0.0) || !bound.is_finite() {
        return Err(Error::Calibration(format!("control bound {bound} admits no motion")));
    }
    if !(tolerance > 0.0) {
        return Err(Error::Calibration(format!("tolerance must be positive, got {tolerance}")));
    }
    // Endpoint matching fixes C(τ); k = bτ - 1 lies in (0, 1) for τ in (1/b, 2/b).
    let coef = |tau: f64| {
        let k = bound * tau - 1.0;
        (tau - 0.5 * bound * tau * tau) / (1.0 + k * k)
    };
    let costate = |tau: f64| {
        let c = coef(tau);
        c * c - c * tau + tau * tau / 3.0 - bound * tau.powi(3) / 12.0
    };
    // τ = 1/b is a spurious root (k = 0, arc ends at the origin).
    let lo = 1.0 / bound;
    let grid: Vec<f64> = (1..SCAN_POINTS).map(|i| lo * (1.0 + i as f64 / SCAN_POINTS as f64)).collect();
    let bracket = grid.windows(2).find(|w| costate(w[0]) * costate(w[1]) <= 0.0);
    let Some(&[mut a, mut b]) = bracket else {
        return Err(Error::Calibration("no self-similar arc in the contraction bracket".into()));
    };
    let fa = costate(a);
    while b - a > tolerance * b {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if costate(m) * fa > 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    let tau = 0.5 * (a + b);
    Ok(SelfSimilarArc { switch_coefficient: coef(tau), contraction: bound * tau - 1.0, arc_time: tau })
}

/// Bellman iteration on the quasi-circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ValueIteration {
    /// Points on the periodic angle grid.
    pub grid: usize,
    /// Arc length `τ` of one Bellman step.
    pub step: f64,
    /// Sup-norm change that ends the iteration.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for ValueIteration {
    fn default() -> Self {
        Self { grid: 32_000, step: 1e-3, tolerance: 1e-15, max_iterations: 500_000 }
    }
}

/// Point of the quasi-circle at polar angle `psi`.
fn quasi_point(psi: f64) -> (f64, f64) {
    let (s, c) = psi.sin_cos();
    let rho = (2.0 / (c * c + (c.powi(4) + 4.0 * s.powi(4)).sqrt())).sqrt();
    (rho * c, rho * s)
}

struct Link {
    cost: f64,
    weight: f64,
    j0: usize,
    j1: usize,
    frac: f64,
}

impl Link {
    fn q(&self, v: &[f64]) -> f64 {
        self.cost + self.weight * ((1.0 - self.frac) * v[self.j0] + self.frac * v[self.j1])
    }
}

/// Switching coefficient read off the tie point of the converged value.
pub fn value_iteration_constant(vi: &ValueIteration) -> Result<f64> {
    let m = vi.grid;
    let tau = vi.step;
    if m < 16 || !(tau > 0.0) || !(vi.tolerance > 0.0) {
        return Err(Error::Calibration(format!("degenerate value-iteration setup {vi:?}")));
    }
    let h = 2.0 * PI / m as f64;
    let link = |i: usize, u: f64| {
        let (x, y) = quasi_point(i as f64 * h);
        let (x1, y1) = arc_state(x, y, u, tau);
        let n = (x1 * x1 + y1.powi(4)).powf(0.25);
        let mut psi = (y1 / n).atan2(x1 / (n * n));
        if psi < 0.0 {
            psi += 2.0 * PI;
        }
        let p = psi / h;
        let j = p.floor();
        Link {
            cost: arc_cost(x, y, u, tau),
            weight: n.powi(5),
            j0: (j as usize) % m,
            j1: (j as usize + 1) % m,
            frac: p - j,
        }
    };
    let links: Vec<(Link, Link)> = (0..m).into_par_iter().map(|i| (link(i, -1.0), link(i, 1.0))).collect();
    let mut v = vec![0.0; m];
    let mut converged = false;
    for _ in 0..vi.max_iterations {
        let next: Vec<f64> = links.par_iter().map(|(a, b)| a.q(&v).min(b.q(&v))).collect();
        let diff = next.iter().zip(&v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        v = next;
        if diff < vi.tolerance {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Calibration(format!("value iteration did not converge in {} sweeps", vi.max_iterations)));
    }
    let d: Vec<f64> = links.iter().map(|(a, b)| b.q(&v) - a.q(&v)).collect();
    // Tie on the branch x < 0 < y.
    for i in 0..m - 1 {
        let psi = i as f64 * h;
        if psi > 0.0 && psi < PI && psi.cos() < 0.0 && d[i] * d[i + 1] < 0.0 {
            let (x, y) = quasi_point(psi + h * d[i] / (d[i] - d[i + 1]));
            // The tie is between decisions held for a whole step; the curve
            // sits half a step further along the `u = +1` arc.
            let (x2, y2) = arc_state(x, y, 1.0, 0.5 * tau);
            return Ok(-x2 / (y2 * y2));
        }
    }
    Err(Error::Calibration("no tie between the two controls on the upper branch".into()))
}
