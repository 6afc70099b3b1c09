//! Planar particle ensembles and their initial conditions.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinetic::MassSpectrum;
use crate::model::{Constants, DensityProfile, RingModel};
use crate::rng::stream;
use crate::vec2::Vec2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticleEnsemble {
    pub positions: Vec<Vec2>,
    pub velocities: Vec<Vec2>,
    pub masses: Vec<f64>,
    pub seed: u64,
}

impl ParticleEnsemble {
    pub fn new(positions: Vec<Vec2>, velocities: Vec<Vec2>, masses: Vec<f64>, seed: u64) -> Result<Self> {
        let e = Self { positions, velocities, masses, seed };
        e.validate()?;
        Ok(e)
    }

    /// Ensemble with no particles; used as the result of total loss.
    pub fn empty(seed: u64) -> Self {
        Self { positions: Vec::new(), velocities: Vec::new(), masses: Vec::new(), seed }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.positions.len();
        if self.velocities.len() != n || self.masses.len() != n {
            return Err(Error::Shape(format!(
                "{} positions, {} velocities, {} masses",
                n,
                self.velocities.len(),
                self.masses.len()
            )));
        }
        if let Some(i) = (0..n).find(|&i| !self.positions[i].is_finite() || !self.velocities[i].is_finite()) {
            return Err(Error::Domain(format!("particle {i} has a non-finite coordinate")));
        }
        if let Some(i) = self.masses.iter().position(|m| !(*m > 0.0) || !m.is_finite()) {
            return Err(Error::Domain(format!("particle {i} has non-positive mass {}", self.masses[i])));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }

    pub fn momentum(&self) -> Vec2 {
        self.velocities.iter().zip(&self.masses).fold(Vec2::ZERO, |acc, (v, m)| acc + *v * *m)
    }

    pub fn kinetic_energy(&self) -> f64 {
        self.velocities.iter().zip(&self.masses).map(|(v, m)| 0.5 * m * v.norm_sq()).sum()
    }

    pub fn angular_momentum(&self) -> f64 {
        (0..self.len()).map(|i| self.masses[i] * self.positions[i].cross(self.velocities[i])).sum()
    }

    pub fn radii(&self) -> Vec<f64> {
        self.positions.iter().map(|p| p.norm()).collect()
    }

    /// Keeps the particles for which `keep` is true, preserving order.
    pub fn retain(&mut self, keep: &[bool]) {
        let mut i = 0;
        self.positions.retain(|_| {
            i += 1;
            keep[i - 1]
        });
        i = 0;
        self.velocities.retain(|_| {
            i += 1;
            keep[i - 1]
        });
        i = 0;
        self.masses.retain(|_| {
            i += 1;
            keep[i - 1]
        });
    }

    /// Sub-ensemble selected by index, repeats allowed.
    pub fn select(&self, idx: &[usize]) -> Self {
        Self {
            positions: idx.iter().map(|&i| self.positions[i]).collect(),
            velocities: idx.iter().map(|&i| self.velocities[i]).collect(),
            masses: idx.iter().map(|&i| self.masses[i]).collect(),
            seed: self.seed,
        }
    }
}

/// Draws `n` radii distributed as the mass of `density`, i.e. with
/// probability density proportional to `σ(r) r`.
pub fn sample_radii<R: Rng>(density: &DensityProfile, n: usize, rng: &mut R) -> Result<Vec<f64>> {
    if density.is_zero() {
        return Err(Error::Density("cannot place particles in a zero density".into()));
    }
    let segs: Vec<(f64, f64, f64, f64)> = density.segments().collect();
    let weights: Vec<f64> =
        segs.iter().map(|&(a, b, sa, sb)| (b - a) * (sa * (2.0 * a + b) + sb * (a + 2.0 * b)) / 6.0).collect();
    let total: f64 = weights.iter().sum();
    let mut cdf = Vec::with_capacity(weights.len());
    let mut acc = 0.0;
    for w in &weights {
        acc += w / total;
        cdf.push(acc);
    }
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let u: f64 = rng.random();
        let s = cdf.partition_point(|c| *c < u).min(segs.len() - 1);
        let (a, b, sa, sb) = segs[s];
        let bound = sa.max(sb) * b;
        // Rejection against the constant envelope max σ · b on the piece.
        loop {
            let r = a + (b - a) * rng.random::<f64>();
            let s_r = sa + (sb - sa) * (r - a) / (b - a);
            if rng.random::<f64>() * bound <= s_r * r {
                out.push(r);
                break;
            }
        }
    }
    Ok(out)
}

/// Particle masses drawn from `spectrum` and rescaled so they sum to `total`.
pub fn sample_masses<R: Rng>(spectrum: &MassSpectrum, n: usize, total: f64, rng: &mut R) -> Vec<f64> {
    let mut m: Vec<f64> = (0..n).map(|_| spectrum.sample(rng)).collect();
    let sum: f64 = m.iter().sum();
    for x in &mut m {
        *x *= total / sum;
    }
    m
}

/// Ring of `n` particles following the model density, each on the circular
/// orbit of the planet-only field plus an isotropic Gaussian velocity of
/// per-axis standard deviation `dispersion`.
pub fn sample_ring_ensemble(
    model: &RingModel,
    n: usize,
    dispersion: f64,
    spectrum: &MassSpectrum,
    seed: u64,
) -> Result<ParticleEnsemble> {
    if n == 0 {
        return Err(Error::Config("ensemble needs at least one particle".into()));
    }
    let mut rng = stream(seed, &[0x5249_4e47]);
    let radii = sample_radii(&model.density, n, &mut rng)?;
    let mut positions = Vec::with_capacity(n);
    let mut velocities = Vec::with_capacity(n);
    for r in radii {
        let phi = 2.0 * PI * rng.random::<f64>();
        let x = Vec2::from_polar(r, phi);
        let vc = (Constants::G * model.saturn_mass / r).sqrt();
        let mut v = Vec2::from_polar(vc, phi + 0.5 * PI);
        if dispersion > 0.0 {
            let zx: f64 = StandardNormal.sample(&mut rng);
            let zy: f64 = StandardNormal.sample(&mut rng);
            v += Vec2::new(zx, zy) * dispersion;
        }
        positions.push(x);
        velocities.push(v);
    }
    let total = model.ring_mass();
    let masses = sample_masses(spectrum, n, total, &mut rng);
    ParticleEnsemble::new(positions, velocities, masses, seed)
}
