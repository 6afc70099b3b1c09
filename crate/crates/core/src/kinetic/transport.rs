//! Finite-difference residuals of the axisymmetric moment equations and the
//! edge pressure flux.
//!
//! In polar components, with `F_r` the radial force per unit mass:
//!
//! ```text
//! continuity  ∂t ρ + (1/r) ∂r (r ρ U_r)
//! radial      ∂t (ρ U_r) + (1/r) ∂r (r ρ P_rr) - ρ P_φφ / r - ρ F_r
//! tangential  ∂t (ρ U_φ) + (1/r²) ∂r (r² ρ P_rφ)
//! heat        2 ∂t (ρ κ T) + (1/r) ∂r (r ρ κ q_r) + ζ T
//! ```
//!
//! Derivatives are centred in time and radius; norms are root-mean-square
//! over interior space-time points.

use std::f64::consts::PI;

use rand::Rng;
use serde::Serialize;

use crate::dynamics::ParticleEnsemble;
use crate::error::{Error, Result};
use crate::gravity::RadialField;
use crate::model::{Constants, RingModel};
use crate::rng::stream;

use super::moments::{compute_moments, Frame, MomentField, RadialCells};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentResiduals {
    pub continuity: f64,
    pub momentum_r: f64,
    pub momentum_phi: f64,
    pub heat: f64,
    /// Interior space-time points entering each norm.
    pub points: usize,
}

struct ResidualFields {
    continuity: Vec<f64>,
    momentum_r: Vec<f64>,
    momentum_phi: Vec<f64>,
    heat: Vec<f64>,
}

fn rms(v: &[f64]) -> f64 {
    (v.iter().map(|x| x * x).sum::<f64>() / v.len() as f64).sqrt()
}

impl ResidualFields {
    fn norms(&self) -> MomentResiduals {
        MomentResiduals {
            continuity: rms(&self.continuity),
            momentum_r: rms(&self.momentum_r),
            momentum_phi: rms(&self.momentum_phi),
            heat: rms(&self.heat),
            points: self.continuity.len(),
        }
    }
}

fn check_series(snapshots: &[MomentField]) -> Result<f64> {
    if snapshots.len() < 3 {
        return Err(Error::InsufficientData(format!("residuals need >= 3 snapshots, got {}", snapshots.len())));
    }
    let first = &snapshots[0];
    if first.cells.len() < 3 {
        return Err(Error::Shape("residuals need at least three radial cells".into()));
    }
    for s in snapshots {
        if s.cells != first.cells {
            return Err(Error::Shape("snapshots are not on a common radial grid".into()));
        }
        if s.frame != Frame::Polar {
            return Err(Error::Shape("residuals are defined for polar-frame moments".into()));
        }
    }
    let dt = snapshots[1].time - snapshots[0].time;
    if !(dt > 0.0) || snapshots.windows(2).any(|w| ((w[1].time - w[0].time) - dt).abs() > 1e-9 * dt) {
        return Err(Error::Shape("snapshot times must be ascending and uniformly spaced".into()));
    }
    Ok(dt)
}

fn residual_fields(
    snapshots: &[MomentField],
    force: &dyn RadialField,
    zeta: Option<&[Vec<f64>]>,
    dt: f64,
) -> Result<ResidualFields> {
    let cells = &snapshots[0].cells;
    let nc = cells.len();
    if let Some(z) = zeta {
        if z.len() != snapshots.len() || z.iter().any(|row| row.len() != nc) {
            return Err(Error::Shape("cooling rates do not match the snapshots".into()));
        }
    }
    let r = cells.centers();
    let f: Vec<f64> = r.iter().map(|&x| force.radial_force(x)).collect();
    let kb = Constants::KB;
    let mut out = ResidualFields { continuity: vec![], momentum_r: vec![], momentum_phi: vec![], heat: vec![] };
    for k in 1..snapshots.len() - 1 {
        let (prev, now, next) = (&snapshots[k - 1].moments, &snapshots[k].moments, &snapshots[k + 1].moments);
        let dtime =
            |g: &dyn Fn(usize, &[super::moments::CellMoments]) -> f64, j: usize| (g(j, next) - g(j, prev)) / (2.0 * dt);
        for j in 1..nc - 1 {
            let dr = r[j + 1] - r[j - 1];
            let m = &now[j];
            let drad = |g: &dyn Fn(usize) -> f64| (g(j + 1) - g(j - 1)) / dr;

            let rho_t = dtime(&|i, s| s[i].rho, j);
            let flux = drad(&|i| r[i] * now[i].rho * now[i].u.x) / r[j];
            out.continuity.push(rho_t + flux);

            let mr_t = dtime(&|i, s| s[i].rho * s[i].u.x, j);
            let prr = drad(&|i| r[i] * now[i].rho * now[i].p.xx) / r[j];
            out.momentum_r.push(mr_t + prr - m.rho * m.p.yy / r[j] - m.rho * f[j]);

            let mp_t = dtime(&|i, s| s[i].rho * s[i].u.y, j);
            let prp = drad(&|i| r[i] * r[i] * now[i].rho * now[i].p.xy) / (r[j] * r[j]);
            out.momentum_phi.push(mp_t + prp);

            let e_t = dtime(&|i, s| s[i].rho * kb * s[i].t, j);
            let qr = drad(&|i| r[i] * now[i].rho * kb * now[i].q.x) / r[j];
            let z = zeta.map(|z| z[k][j]).unwrap_or(0.0);
            out.heat.push(2.0 * e_t + qr + z * m.t);
        }
    }
    Ok(out)
}

/// Residual norms of the continuity, radial and tangential momentum and heat
/// balances over a uniformly spaced snapshot series. `zeta[k][j]` is the
/// cooling rate of cell `j` at snapshot `k`; absent means no collisions.
pub fn moment_residuals(
    snapshots: &[MomentField],
    force: &dyn RadialField,
    zeta: Option<&[Vec<f64>]>,
) -> Result<MomentResiduals> {
    let dt = check_series(snapshots)?;
    Ok(residual_fields(snapshots, force, zeta, dt)?.norms())
}

/// Sampling noise of the residuals: the root-mean-square over points of the
/// bootstrap standard deviation, resampling particles consistently across
/// all snapshots.
pub fn residual_bootstrap_floor(
    snapshots: &[(f64, ParticleEnsemble)],
    cells: &RadialCells,
    force: &dyn RadialField,
    resamples: usize,
    seed: u64,
) -> Result<MomentResiduals> {
    if resamples < 2 {
        return Err(Error::InsufficientData("bootstrap needs at least two resamples".into()));
    }
    let n = snapshots.first().map(|s| s.1.len()).unwrap_or(0);
    if n == 0 || snapshots.iter().any(|s| s.1.len() != n) {
        return Err(Error::Shape("bootstrap needs the same non-empty particle set in every snapshot".into()));
    }
    let mut rng = stream(seed, &[0x424f_4f54]);
    let mut sum: Option<ResidualFields> = None;
    let mut sum_sq: Option<ResidualFields> = None;
    for _ in 0..resamples {
        let idx: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
        let fields: Vec<MomentField> = snapshots
            .iter()
            .map(|(t, e)| {
                let mut f = compute_moments(&e.select(&idx), cells, Frame::Polar);
                f.time = *t;
                f
            })
            .collect();
        let dt = check_series(&fields)?;
        let r = residual_fields(&fields, force, None, dt)?;
        let acc = |a: &mut Option<ResidualFields>, sq: bool| {
            let pick = |v: &[f64]| -> Vec<f64> { v.iter().map(|x| if sq { x * x } else { *x }).collect() };
            match a {
                None => {
                    *a = Some(ResidualFields {
                        continuity: pick(&r.continuity),
                        momentum_r: pick(&r.momentum_r),
                        momentum_phi: pick(&r.momentum_phi),
                        heat: pick(&r.heat),
                    })
                }
                Some(s) => {
                    for (dst, src) in [
                        (&mut s.continuity, &r.continuity),
                        (&mut s.momentum_r, &r.momentum_r),
                        (&mut s.momentum_phi, &r.momentum_phi),
                        (&mut s.heat, &r.heat),
                    ] {
                        for (d, x) in dst.iter_mut().zip(src.iter()) {
                            *d += if sq { x * x } else { *x };
                        }
                    }
                }
            }
        };
        acc(&mut sum, false);
        acc(&mut sum_sq, true);
    }
    let (s, s2) = (sum.unwrap(), sum_sq.unwrap());
    let b = resamples as f64;
    let sd = |m: &[f64], q: &[f64]| -> f64 {
        let var: Vec<f64> = m.iter().zip(q).map(|(a, c)| ((c - a * a / b) / (b - 1.0)).max(0.0).sqrt()).collect();
        rms(&var)
    };
    Ok(MomentResiduals {
        continuity: sd(&s.continuity, &s2.continuity),
        momentum_r: sd(&s.momentum_r, &s2.momentum_r),
        momentum_phi: sd(&s.momentum_phi, &s2.momentum_phi),
        heat: sd(&s.heat, &s2.heat),
        points: s.continuity.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EdgeFlux {
    pub delta: f64,
    /// `2π r ρ P_rr` on the circle `R1 + δ`.
    pub inner: f64,
    /// `2π r ρ P_rr` on the circle `R2 - δ`.
    pub outer: f64,
    /// Pressure flux entering the ring through both circles.
    pub net: f64,
}

fn interpolate_rho_prr(field: &MomentField, r: f64) -> Result<f64> {
    let c = field.cells.centers();
    if r < c[0] || r > c[c.len() - 1] {
        return Err(Error::Coverage(format!(
            "radius {r} lies outside the cell centres [{}, {}]",
            c[0],
            c[c.len() - 1]
        )));
    }
    let i = (c.partition_point(|x| *x <= r).max(1) - 1).min(c.len() - 2);
    let g = |j: usize| field.moments[j].rho * field.moments[j].p.xx;
    let t = (r - c[i]) / (c[i + 1] - c[i]);
    Ok(g(i) + t * (g(i + 1) - g(i)))
}

/// Inward flux of `ρ P_rr` through the circles at distance δ inside each
/// ring edge, for every δ.
pub fn edge_flux_diagnostic(field: &MomentField, model: &RingModel, deltas: &[f64]) -> Result<Vec<EdgeFlux>> {
    if field.frame != Frame::Polar {
        return Err(Error::Shape("edge flux needs polar-frame moments".into()));
    }
    let width = model.width();
    if deltas.is_empty()
        || deltas.iter().any(|d| !(*d > 0.0) || *d >= 0.25 * width)
        || deltas.windows(2).any(|w| !(w[1] > w[0]))
    {
        return Err(Error::Domain("deltas must be positive, ascending and below a quarter of the ring width".into()));
    }
    deltas
        .iter()
        .map(|&d| {
            let (ri, ro) = (model.inner_radius + d, model.outer_radius - d);
            let inner = 2.0 * PI * ri * interpolate_rho_prr(field, ri)?;
            let outer = 2.0 * PI * ro * interpolate_rho_prr(field, ro)?;
            Ok(EdgeFlux { delta: d, inner, outer, net: inner + outer })
        })
        .collect()
}
