//! Direct simulation Monte Carlo collisions of inelastic hard discs.
//!
//! Candidate pairs are drawn per square cell with the no-time-counter rule
//! `N_cand = n (n - 1) σ g_max Δt / (2 A)` and accepted with probability
//! `g / g_max`. Each cell draws from its own stream keyed by
//! `(seed, ix, iy, step)`, so results do not depend on scheduling.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::ParticleEnsemble;
use crate::error::{Error, Result};
use crate::model::Constants;
use crate::rng::stream;
use crate::table::{Cell, Table};
use crate::vec2::Vec2;

use super::moments::MomentField;
use super::params::CollisionParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CollisionEvent {
    /// Midpoint of the colliding pair.
    pub position: Vec2,
    /// Kinetic energy removed, `(1 - e²) μ g_n² / 2`.
    pub energy_loss: f64,
    /// Approach speed along the line of centres before the collision.
    pub normal_speed: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct CollisionStats {
    pub dt: f64,
    pub particles: usize,
    pub candidates: usize,
    pub collisions: usize,
    /// `|P_after - P_before|` over the whole ensemble.
    pub momentum_residual: f64,
    pub energy_dissipated: f64,
    /// Kinetic energy about the cell means before the step.
    pub thermal_energy: f64,
    /// `energy_dissipated / (2 Δt thermal_energy)`.
    pub zeta: f64,
    /// Mean free time `Δt N / (2 collisions)`; infinite without collisions.
    pub lambda: f64,
    pub events: Vec<CollisionEvent>,
}

impl CollisionStats {
    pub fn ledger_row(&self, t: f64) -> Vec<Cell> {
        vec![t.into(), self.collisions.into(), self.energy_dissipated.into(), self.zeta.into(), self.lambda.into()]
    }
}

pub fn collision_ledger_table(rows: &[(f64, CollisionStats)]) -> Table {
    let mut t = Table::new(&["t", "collisions", "dE", "zeta_hat", "lambda_hat"]);
    for (time, s) in rows {
        t.push(s.ledger_row(*time));
    }
    t
}

/// Outcome of one binary collision with unit normal `n` pointing from
/// particle 1 to particle 2.
///
/// Returns the new velocities and the kinetic energy lost. Pairs that are
/// separating along `n` are left unchanged.
pub fn binary_collision(v1: Vec2, v2: Vec2, m1: f64, m2: f64, restitution: f64, n: Vec2) -> (Vec2, Vec2, f64) {
    let g = v1 - v2;
    let gn = g.dot(n);
    if gn <= 0.0 {
        return (v1, v2, 0.0);
    }
    let mt = m1 + m2;
    let j = (1.0 + restitution) * gn;
    let v1n = v1 - n * (m2 / mt * j);
    let v2n = v2 + n * (m1 / mt * j);
    let mu = m1 * m2 / mt;
    (v1n, v2n, 0.5 * (1.0 - restitution * restitution) * mu * gn * gn)
}

struct CellOutcome {
    updates: Vec<(usize, Vec2)>,
    events: Vec<CollisionEvent>,
    candidates: usize,
    thermal: f64,
}

fn collide_cell(
    ensemble: &ParticleEnsemble,
    idx: &[usize],
    params: &CollisionParams,
    dt: f64,
    mut rng: impl Rng,
) -> CellOutcome {
    let n = idx.len();
    let mut v: Vec<Vec2> = idx.iter().map(|&k| ensemble.velocities[k]).collect();
    let m: Vec<f64> = idx.iter().map(|&k| ensemble.masses[k]).collect();
    let mass: f64 = m.iter().sum();
    let mean = v.iter().zip(&m).fold(Vec2::ZERO, |a, (x, w)| a + *x * *w) * (1.0 / mass);
    let thermal: f64 = v.iter().zip(&m).map(|(x, w)| 0.5 * w * (*x - mean).norm_sq()).sum();
    let mut out = CellOutcome { updates: Vec::new(), events: Vec::new(), candidates: 0, thermal };
    if n < 2 {
        return out;
    }
    let sigma = params.cross_section();
    // Any pair speed is at most twice the largest deviation from the mean.
    let g_max = 2.0 * v.iter().map(|x| (*x - mean).norm()).fold(0.0, f64::max);
    if sigma == 0.0 || g_max == 0.0 {
        return out;
    }
    let area = params.cell_size * params.cell_size;
    let expected = 0.5 * (n * (n - 1)) as f64 * sigma * g_max * dt / area;
    let mut cand = expected.floor() as usize;
    if rng.random::<f64>() < expected - expected.floor() {
        cand += 1;
    }
    out.candidates = cand;
    let mut touched = vec![false; n];
    for _ in 0..cand {
        let a = rng.random_range(0..n);
        let mut b = rng.random_range(0..n - 1);
        if b >= a {
            b += 1;
        }
        let g = v[a] - v[b];
        let gm = g.norm();
        let u_accept: f64 = rng.random();
        let s: f64 = rng.random_range(-1.0..1.0);
        if gm == 0.0 || u_accept * g_max >= gm {
            continue;
        }
        // Impact parameter b = s·d puts the line of centres at angle asin(s) from g.
        let gh = g * (1.0 / gm);
        let normal = gh * (1.0 - s * s).sqrt() + gh.perp() * s;
        let (va, vb, loss) = binary_collision(v[a], v[b], m[a], m[b], params.restitution, normal);
        let gn = g.dot(normal);
        v[a] = va;
        v[b] = vb;
        touched[a] = true;
        touched[b] = true;
        let pos = (ensemble.positions[idx[a]] + ensemble.positions[idx[b]]) * 0.5;
        out.events.push(CollisionEvent { position: pos, energy_loss: loss, normal_speed: gn });
    }
    out.updates = (0..n).filter(|&j| touched[j]).map(|j| (idx[j], v[j])).collect();
    out
}

/// One collision step over square cells of side `params.cell_size`.
pub fn dsmc_collide(
    ensemble: &ParticleEnsemble,
    params: &CollisionParams,
    dt: f64,
    seed: u64,
    step: u64,
) -> Result<(ParticleEnsemble, CollisionStats)> {
    params.validate()?;
    if !(dt > 0.0) {
        return Err(Error::Domain(format!("collision step must be positive, got {dt}")));
    }
    let cs = params.cell_size;
    let mut cells: BTreeMap<(i64, i64), Vec<usize>> = BTreeMap::new();
    for (k, x) in ensemble.positions.iter().enumerate() {
        cells.entry(((x.x / cs).floor() as i64, (x.y / cs).floor() as i64)).or_default().push(k);
    }
    let keyed: Vec<(&(i64, i64), &Vec<usize>)> = cells.iter().collect();
    let outcomes: Vec<CellOutcome> = keyed
        .par_iter()
        .map(|((ix, iy), idx)| {
            let rng = stream(seed, &[*ix as u64, *iy as u64, step]);
            collide_cell(ensemble, idx, params, dt, rng)
        })
        .collect();

    let before = ensemble.momentum();
    let mut next = ensemble.clone();
    let mut stats = CollisionStats { dt, particles: ensemble.len(), ..Default::default() };
    for o in outcomes {
        for (k, v) in o.updates {
            next.velocities[k] = v;
        }
        stats.candidates += o.candidates;
        stats.thermal_energy += o.thermal;
        stats.collisions += o.events.len();
        stats.energy_dissipated += o.events.iter().map(|e| e.energy_loss).sum::<f64>();
        stats.events.extend(o.events);
    }
    stats.momentum_residual = (next.momentum() - before).norm();
    stats.zeta =
        if stats.energy_dissipated == 0.0 { 0.0 } else { stats.energy_dissipated / (2.0 * dt * stats.thermal_energy) };
    stats.lambda = if stats.collisions == 0 {
        f64::INFINITY
    } else {
        dt * ensemble.len() as f64 / (2.0 * stats.collisions as f64)
    };
    Ok((next, stats))
}

/// Cooling rate `ζ = Ḋ / (2 ρ κ T)` per radial cell, with `Ḋ` the energy
/// dissipated per unit time and area. `None` for cells without particles or
/// temperature.
pub fn estimate_cooling_rate(stats: &CollisionStats, field: &MomentField) -> Vec<Option<f64>> {
    let mut loss = vec![0.0; field.cells.len()];
    for e in &stats.events {
        if let Some(i) = field.cells.index(e.position.norm()) {
            loss[i] += e.energy_loss;
        }
    }
    field
        .moments
        .iter()
        .enumerate()
        .map(|(i, m)| {
            if m.empty || !(m.t > 0.0) {
                return None;
            }
            let d_dot = loss[i] / (stats.dt * field.cells.area(i));
            Some(d_dot / (2.0 * m.rho * Constants::KB * m.t))
        })
        .collect()
}

/// Advances positions ballistically and wraps them into `[0, side)²`.
pub fn stream_periodic(ensemble: &mut ParticleEnsemble, dt: f64, side: f64) {
    for (x, v) in ensemble.positions.iter_mut().zip(&ensemble.velocities) {
        let mut p = *x + *v * dt;
        p.x = p.x.rem_euclid(side);
        p.y = p.y.rem_euclid(side);
        *x = p;
    }
}
