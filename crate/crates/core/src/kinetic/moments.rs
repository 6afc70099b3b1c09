//! Maxwellian sampling and macroscopic moments on radial cells.

use std::f64::consts::PI;

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::ParticleEnsemble;
use crate::error::{Error, Result};
use crate::model::Constants;
use crate::rng::stream;
use crate::table::Table;
use crate::vec2::Vec2;

/// `n` velocities `U + sqrt(κ T) z` with `z` standard normal per axis.
pub fn sample_maxwellian(u: Vec2, temperature: f64, n: usize, seed: u64) -> Result<Vec<Vec2>> {
    if !(temperature >= 0.0) || !temperature.is_finite() {
        return Err(Error::Domain(format!("temperature must be finite and >= 0, got {temperature}")));
    }
    if n == 0 {
        return Err(Error::Domain("Maxwellian sample needs at least one velocity".into()));
    }
    let s = (Constants::KB * temperature).sqrt();
    let mut rng = stream(seed, &[0x4d41_5857]);
    Ok((0..n)
        .map(|_| {
            let zx: f64 = StandardNormal.sample(&mut rng);
            let zy: f64 = StandardNormal.sample(&mut rng);
            u + Vec2::new(zx * s, zy * s)
        })
        .collect())
}

/// Velocity components used for the moments: Cartesian `(x, y)` or local
/// polar `(r, φ)` at each particle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Frame {
    Cartesian,
    #[default]
    Polar,
}

impl Frame {
    pub fn project(self, x: Vec2, v: Vec2) -> Vec2 {
        match self {
            Frame::Cartesian => v,
            Frame::Polar => {
                let r = x.norm();
                if r == 0.0 {
                    return v;
                }
                let er = x * (1.0 / r);
                Vec2::new(v.dot(er), er.cross(v))
            }
        }
    }
}

/// Annular cells between ascending radial edges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialCells {
    pub edges: Vec<f64>,
}

impl RadialCells {
    pub fn new(edges: Vec<f64>) -> Result<Self> {
        if edges.len() < 2 || edges[0] < 0.0 || edges.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Domain("cell edges must be >= 0 and strictly ascending".into()));
        }
        Ok(Self { edges })
    }

    pub fn uniform(lo: f64, hi: f64, n: usize) -> Result<Self> {
        Self::new((0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect())
    }

    pub fn len(&self) -> usize {
        self.edges.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn center(&self, i: usize) -> f64 {
        0.5 * (self.edges[i] + self.edges[i + 1])
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.center(i)).collect()
    }

    pub fn area(&self, i: usize) -> f64 {
        PI * (self.edges[i + 1].powi(2) - self.edges[i].powi(2))
    }

    pub fn index(&self, r: f64) -> Option<usize> {
        if r < self.edges[0] || r >= self.edges[self.edges.len() - 1] {
            return None;
        }
        Some(self.edges.partition_point(|e| *e <= r) - 1)
    }
}

/// Symmetric 2×2 tensor.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Sym2 {
    pub xx: f64,
    pub xy: f64,
    pub yy: f64,
}

impl Sym2 {
    pub fn eigenvalues(self) -> (f64, f64) {
        let m = 0.5 * (self.xx + self.yy);
        let d = (0.25 * (self.xx - self.yy).powi(2) + self.xy * self.xy).sqrt();
        (m - d, m + d)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CellMoments {
    pub count: usize,
    pub mass: f64,
    /// Mass per unit area.
    pub rho: f64,
    pub u: Vec2,
    /// Kinetic temperature per unit mass: `Σ m |W|² / (2 κ Σ m)`.
    pub t: f64,
    /// Second moment `<v_i v_j>` of the full velocity, per unit mass.
    pub p: Sym2,
    /// `<|W|² V>` per unit mass.
    pub q: Vec2,
    /// Kish effective sample size `(Σ m)² / Σ m²`.
    pub n_eff: f64,
    pub empty: bool,
}

impl CellMoments {
    pub fn pressure(&self) -> f64 {
        Constants::KB * self.rho * self.t
    }

    /// Standard error of each mean-velocity component.
    pub fn se_u(&self) -> f64 {
        (Constants::KB * self.t / self.n_eff).sqrt()
    }

    pub fn se_t(&self) -> f64 {
        self.t / self.n_eff.sqrt()
    }

    /// Standard errors of `(P_xx, P_xy)` for a Maxwellian at rest.
    pub fn se_p(&self) -> (f64, f64) {
        let s = Constants::KB * self.t;
        (s * (2.0 / self.n_eff).sqrt(), s / self.n_eff.sqrt())
    }

    /// Standard error of each heat-flux component for a Maxwellian at rest.
    pub fn se_q(&self) -> f64 {
        let s = Constants::KB * self.t;
        (24.0 * s.powi(3) / self.n_eff).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentField {
    pub cells: RadialCells,
    pub frame: Frame,
    pub time: f64,
    pub moments: Vec<CellMoments>,
}

impl MomentField {
    pub fn to_table(&self) -> Table {
        let mut t = Table::new(&["cell_R", "rho", "Ux", "Uy", "T", "Pxx", "Pxy", "Pyy", "qx", "qy", "count"]);
        for (i, m) in self.moments.iter().enumerate() {
            t.push(vec![
                self.cells.center(i).into(),
                m.rho.into(),
                m.u.x.into(),
                m.u.y.into(),
                m.t.into(),
                m.p.xx.into(),
                m.p.xy.into(),
                m.p.yy.into(),
                m.q.x.into(),
                m.q.y.into(),
                m.count.into(),
            ]);
        }
        t
    }
}

/// Groups particle indices by cell, each list in ascending particle order.
pub(crate) fn bin_particles(ensemble: &ParticleEnsemble, cells: &RadialCells) -> Vec<Vec<usize>> {
    let mut bins = vec![Vec::new(); cells.len()];
    for (k, x) in ensemble.positions.iter().enumerate() {
        if let Some(i) = cells.index(x.norm()) {
            bins[i].push(k);
        }
    }
    bins
}

fn cell_moments(ensemble: &ParticleEnsemble, idx: &[usize], frame: Frame, area: f64) -> CellMoments {
    if idx.is_empty() {
        return CellMoments { empty: true, ..Default::default() };
    }
    let vel: Vec<Vec2> = idx.iter().map(|&k| frame.project(ensemble.positions[k], ensemble.velocities[k])).collect();
    let mut mass = 0.0;
    let mut mass_sq = 0.0;
    let mut mom = Vec2::ZERO;
    for (j, &k) in idx.iter().enumerate() {
        let m = ensemble.masses[k];
        mass += m;
        mass_sq += m * m;
        mom += vel[j] * m;
    }
    let u = mom * (1.0 / mass);
    let (mut w2, mut p, mut q) = (0.0, Sym2::default(), Vec2::ZERO);
    for (j, &k) in idx.iter().enumerate() {
        let m = ensemble.masses[k];
        let v = vel[j];
        let w = v - u;
        let ww = w.norm_sq();
        w2 += m * ww;
        p.xx += m * v.x * v.x;
        p.xy += m * v.x * v.y;
        p.yy += m * v.y * v.y;
        q += v * (m * ww);
    }
    let inv = 1.0 / mass;
    CellMoments {
        count: idx.len(),
        mass,
        rho: mass / area,
        u,
        t: w2 * inv / (2.0 * Constants::KB),
        p: Sym2 { xx: p.xx * inv, xy: p.xy * inv, yy: p.yy * inv },
        q: q * inv,
        n_eff: mass * mass / mass_sq,
        empty: false,
    }
}

/// Mass-weighted density, mean velocity, temperature, second moment and
/// heat flux in every cell. Particles outside the cells are ignored.
pub fn compute_moments(ensemble: &ParticleEnsemble, cells: &RadialCells, frame: Frame) -> MomentField {
    let bins = bin_particles(ensemble, cells);
    let moments =
        bins.par_iter().enumerate().map(|(i, idx)| cell_moments(ensemble, idx, frame, cells.area(i))).collect();
    MomentField { cells: cells.clone(), frame, time: 0.0, moments }
}
