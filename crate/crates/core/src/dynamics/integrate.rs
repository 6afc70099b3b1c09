//! Forces on ring particles, the time step and the mean-field rebinning.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::config::Scheme;
use crate::error::{Error, Result};
use crate::gravity::{annulus_radial_force, saturn_force};
use crate::model::{Constants, DensityProfile, Moon, RingModel};
use crate::vec2::Vec2;

use super::ensemble::ParticleEnsemble;
use super::meanfield::MeanField;

fn moon_pull(moons: &[Moon], t: f64, x: Vec2) -> Result<Vec2> {
    let mut a = Vec2::ZERO;
    for (i, m) in moons.iter().enumerate() {
        let d = m.position(t) - x;
        let r2 = d.norm_sq();
        if r2 == 0.0 {
            return Err(Error::Singular(format!("point coincides with moon {i} at t = {t}")));
        }
        a += d * (Constants::G * m.mass / (r2 * r2.sqrt()));
    }
    Ok(a)
}

/// Planet, ring and moon attraction at `x` and time `t`, with the ring term
/// from direct quadrature of `density_now`.
pub fn total_force(model: &RingModel, density_now: &DensityProfile, t: f64, x: Vec2, tol: f64) -> Result<Vec2> {
    let mut a = saturn_force(model, x)?;
    let r = x.norm();
    a += x * (annulus_radial_force(density_now, r, tol)? / r);
    a += moon_pull(&model.moons, t, x)?;
    Ok(a)
}

/// Force law used by the integrator: tabulated ring field plus toggles.
#[derive(Debug, Clone)]
pub struct ForceModel {
    pub model: RingModel,
    pub field: MeanField,
    pub moons: bool,
}

impl ForceModel {
    pub fn new(model: &RingModel, field: MeanField, moons: bool) -> Self {
        Self { model: model.clone(), field, moons }
    }

    pub fn planet_only(model: &RingModel) -> Self {
        Self::new(model, MeanField::zero(), false)
    }

    pub fn acceleration(&self, t: f64, x: Vec2) -> Result<Vec2> {
        let mut a = saturn_force(&self.model, x)?;
        if !self.field.is_zero() {
            let r = x.norm();
            a += x * (self.field.force(r) / r);
        }
        if self.moons {
            a += moon_pull(&self.model.moons, t, x)?;
        }
        Ok(a)
    }

    /// Planet potential per unit mass at radius `r`.
    pub fn planet_potential(&self, r: f64) -> f64 {
        -Constants::G * self.model.saturn_mass / r
    }

    pub fn moon_potential(&self, t: f64, x: Vec2) -> f64 {
        if !self.moons {
            return 0.0;
        }
        self.model.moons.iter().map(|m| -Constants::G * m.mass / (m.position(t) - x).norm()).sum()
    }
}

/// Radii outside which particles leave the run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub absorb: f64,
    pub escape: f64,
}

impl Bounds {
    pub fn unbounded() -> Self {
        Self { absorb: 0.0, escape: f64::INFINITY }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct StepLoss {
    pub fallen: usize,
    pub escaped: usize,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Fate {
    Active,
    Fallen,
    Escaped,
}

fn classify(x: Vec2, b: Bounds) -> Fate {
    let r = x.norm();
    if r < b.absorb {
        Fate::Fallen
    } else if r > b.escape {
        Fate::Escaped
    } else {
        Fate::Active
    }
}

fn accelerations(forces: &ForceModel, t: f64, pos: &[Vec2], fate: &[Fate]) -> Result<Vec<Vec2>> {
    pos.par_iter()
        .zip(fate.par_iter())
        .map(|(x, f)| if *f == Fate::Active { forces.acceleration(t, *x) } else { Ok(Vec2::ZERO) })
        .collect()
}

/// Kick-drift-kick of length `h` starting at time `t`.
#[allow(clippy::too_many_arguments)]
fn kdk(
    forces: &ForceModel,
    t: f64,
    h: f64,
    pos: &mut [Vec2],
    vel: &mut [Vec2],
    fate: &mut [Fate],
    bounds: Bounds,
    a_start: Option<Vec<Vec2>>,
) -> Result<Vec<Vec2>> {
    let a0 = match a_start {
        Some(a) => a,
        None => accelerations(forces, t, pos, fate)?,
    };
    for i in 0..pos.len() {
        if fate[i] == Fate::Active {
            vel[i] += a0[i] * (0.5 * h);
            pos[i] += vel[i] * h;
            fate[i] = classify(pos[i], bounds);
        }
    }
    let a1 = accelerations(forces, t + h, pos, fate)?;
    for i in 0..pos.len() {
        if fate[i] == Fate::Active {
            vel[i] += a1[i] * (0.5 * h);
        }
    }
    Ok(a1)
}

/// Advances every particle by `dt`. Particles inside `bounds.absorb` have
/// fallen onto the planet and those beyond `bounds.escape` have escaped;
/// both are removed and counted.
pub fn step_ensemble(
    ensemble: &ParticleEnsemble,
    forces: &ForceModel,
    t: f64,
    dt: f64,
    scheme: Scheme,
    bounds: Bounds,
) -> Result<(ParticleEnsemble, StepLoss)> {
    if !(dt >= 0.0) {
        return Err(Error::Domain(format!("time step must be >= 0, got {dt}")));
    }
    let mut next = ensemble.clone();
    let mut fate: Vec<Fate> = next.positions.iter().map(|x| classify(*x, bounds)).collect();
    match scheme {
        Scheme::Leapfrog => {
            kdk(forces, t, dt, &mut next.positions, &mut next.velocities, &mut fate, bounds, None)?;
        }
        Scheme::Yoshida4 => {
            let c = 2f64.powf(1.0 / 3.0);
            let w1 = 1.0 / (2.0 - c);
            let w0 = -c * w1;
            let mut tau = t;
            let mut carry = None;
            for w in [w1, w0, w1] {
                let a = kdk(forces, tau, w * dt, &mut next.positions, &mut next.velocities, &mut fate, bounds, carry)?;
                carry = Some(a);
                tau += w * dt;
            }
        }
    }
    let loss = StepLoss {
        fallen: fate.iter().filter(|f| **f == Fate::Fallen).count(),
        escaped: fate.iter().filter(|f| **f == Fate::Escaped).count(),
    };
    if loss.fallen + loss.escaped > 0 {
        let keep: Vec<bool> = fate.iter().map(|f| *f == Fate::Active).collect();
        next.retain(&keep);
    }
    Ok((next, loss))
}

/// Radial histogram `(centres, σ, bin masses)` on the bin `edges`.
pub fn radial_histogram(ensemble: &ParticleEnsemble, edges: &[f64]) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    if edges.len() < 2 || edges.windows(2).any(|w| !(w[1] > w[0])) || edges[0] < 0.0 {
        return Err(Error::Domain("histogram edges must be >= 0 and strictly ascending".into()));
    }
    let nb = edges.len() - 1;
    let mut mass = vec![0.0; nb];
    for (x, m) in ensemble.positions.iter().zip(&ensemble.masses) {
        let r = x.norm();
        if r >= edges[0] && r <= edges[nb] {
            let i = (edges.partition_point(|e| *e <= r).max(1) - 1).min(nb - 1);
            mass[i] += m;
        }
    }
    let centres = (0..nb).map(|i| 0.5 * (edges[i] + edges[i + 1])).collect();
    let sigma = (0..nb).map(|i| mass[i] / (PI * (edges[i + 1].powi(2) - edges[i].powi(2)))).collect();
    Ok((centres, sigma, mass))
}

/// Surface density of the ensemble on the bins `edges`.
///
/// The histogram densities sit at the bin centres and are carried flat to
/// the outer edges; a final uniform rescale makes the profile's mass equal
/// the binned particle mass exactly.
pub fn rebin_density(ensemble: &ParticleEnsemble, edges: &[f64]) -> Result<DensityProfile> {
    let (centres, sigma, mass) = radial_histogram(ensemble, edges)?;
    let total: f64 = mass.iter().sum();
    if ensemble.is_empty() || total == 0.0 {
        return Ok(DensityProfile::zero());
    }
    let nb = centres.len();
    let mut knots = Vec::with_capacity(nb + 2);
    let mut values = Vec::with_capacity(nb + 2);
    knots.push(edges[0]);
    values.push(sigma[0]);
    for i in 0..nb {
        knots.push(centres[i]);
        values.push(sigma[i]);
    }
    knots.push(edges[nb]);
    values.push(sigma[nb - 1]);
    let raw = DensityProfile::new(knots, values)?;
    Ok(raw.scaled(total / raw.mass()))
}

/// `bins` equal-width bins spanning the radii of the ensemble, padded so no
/// particle sits on the outermost edges.
pub fn rebin_edges(ensemble: &ParticleEnsemble, bins: usize) -> Option<Vec<f64>> {
    let radii = ensemble.radii();
    let lo = radii.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = radii.iter().cloned().fold(0.0, f64::max);
    if !(hi > lo) || bins == 0 {
        return None;
    }
    let pad = 1e-9 * (hi - lo);
    let (lo, hi) = ((lo - pad).max(0.0), hi + pad);
    Some((0..=bins).map(|i| lo + (hi - lo) * i as f64 / bins as f64).collect())
}
