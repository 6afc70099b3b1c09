//! Tabulated net radial force and its zeros (libration circles).

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::RingModel;
use crate::table::Table;

use super::annulus::annulus_radial_force;
use super::{saturn_radial, RadialField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stability {
    Stable,
    Unstable,
}

impl std::fmt::Display for Stability {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Stability::Stable => "stable",
            Stability::Unstable => "unstable",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Libration {
    pub radius: f64,
    pub stability: Stability,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialForceProfile {
    pub radii: Vec<f64>,
    pub net_force: Vec<f64>,
    pub saturn_force: Vec<f64>,
    pub ring_force: Vec<f64>,
    pub roots: Vec<Libration>,
    pub quad_tolerance: f64,
    /// Grid points moved off a density edge.
    pub warnings: Vec<String>,
    #[serde(skip)]
    pub model: RingModel,
}

impl RadialForceProfile {
    pub fn to_table(&self) -> Table {
        let mut t = Table::new(&["R", "F_net", "F_saturn", "F_ring"]);
        for i in 0..self.radii.len() {
            t.push(vec![
                self.radii[i].into(),
                self.net_force[i].into(),
                self.saturn_force[i].into(),
                self.ring_force[i].into(),
            ]);
        }
        t
    }

    pub fn librations_table(&self) -> Table {
        let mut t = Table::new(&["radius", "stability"]);
        for r in &self.roots {
            t.push(vec![r.radius.into(), r.stability.to_string().into()]);
        }
        t
    }

    /// Net force re-evaluated at an arbitrary radius.
    pub fn evaluate(&self, r: f64) -> Result<f64> {
        evaluate_net(&self.model, r, self.quad_tolerance)
    }
}

/// Linear interpolation of the tabulated net force, continued as `c / r^2`
/// outside the table.
impl RadialField for RadialForceProfile {
    fn radial_force(&self, r: f64) -> f64 {
        let n = self.radii.len();
        if r <= self.radii[0] {
            return self.net_force[0] * (self.radii[0] / r).powi(2);
        }
        if r >= self.radii[n - 1] {
            return self.net_force[n - 1] * (self.radii[n - 1] / r).powi(2);
        }
        let i = self.radii.partition_point(|x| *x <= r) - 1;
        let t = (r - self.radii[i]) / (self.radii[i + 1] - self.radii[i]);
        self.net_force[i] + t * (self.net_force[i + 1] - self.net_force[i])
    }
}

fn evaluate_parts(model: &RingModel, r: f64, tol: f64) -> Result<(f64, f64)> {
    let fs = saturn_radial(model, r)?;
    let fr = annulus_radial_force(&model.density, r, tol).map_err(|e| match e {
        Error::Quadrature { .. } => Error::QuadratureAt { radius: r, source: Box::new(e) },
        other => other,
    })?;
    Ok((fs, fr))
}

fn evaluate_net(model: &RingModel, r: f64, tol: f64) -> Result<f64> {
    let (fs, fr) = evaluate_parts(model, r, tol)?;
    Ok(fs + fr)
}

/// Radii where the force diverges: density jumps and the nominal ring edges.
fn edge_radii(model: &RingModel) -> Vec<f64> {
    let mut e: Vec<f64> = model.density.jumps().into_iter().map(|(r, _)| r).collect();
    e.push(model.inner_radius);
    e.push(model.outer_radius);
    e.sort_by(f64::total_cmp);
    e.dedup();
    e
}

/// Tabulates planet, ring and net radial force on `grid` and locates the
/// libration circles.
pub fn net_radial_profile(model: &RingModel, grid: &[f64], tol: f64) -> Result<RadialForceProfile> {
    if grid.len() < 2 {
        return Err(Error::InsufficientData("profile grid needs at least two radii".into()));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) || !(grid[0] > 0.0) {
        return Err(Error::Domain("profile grid must be positive and strictly ascending".into()));
    }
    let delta = 1e-12 * model.width();
    let edges = edge_radii(model);
    let mut warnings = Vec::new();
    let radii: Vec<f64> = grid
        .iter()
        .map(|&r| {
            for &e in &edges {
                if (r - e).abs() <= delta {
                    // Step to the outside of the support, where the limit is one-sided.
                    let moved = if e <= model.inner_radius { e - delta } else { e + delta };
                    warnings.push(format!("grid radius {r} coincides with edge {e}; moved to {moved}"));
                    return moved;
                }
            }
            r
        })
        .collect();
    if radii.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Domain("profile grid is not ascending after moving points off the edges".into()));
    }
    let parts = radii.par_iter().map(|&r| evaluate_parts(model, r, tol)).collect::<Result<Vec<_>>>()?;
    let saturn_force: Vec<f64> = parts.iter().map(|p| p.0).collect();
    let ring_force: Vec<f64> = parts.iter().map(|p| p.1).collect();
    let net_force = parts.iter().map(|p| p.0 + p.1).collect();
    let mut profile = RadialForceProfile {
        radii,
        net_force,
        saturn_force,
        ring_force,
        roots: Vec::new(),
        quad_tolerance: tol,
        warnings,
        model: model.clone(),
    };
    let span = profile.radii[profile.radii.len() - 1];
    profile.roots = find_librations(&profile, 1e-13 * span)?;
    Ok(profile)
}

/// Brackets every sign change of the tabulated net force and refines it by
/// bisection on freshly evaluated forces.
///
/// A grid interval containing a density edge is split just either side of
/// it, so roots hugging the edge are not hidden by the divergence.
pub fn find_librations(profile: &RadialForceProfile, refine_tol: f64) -> Result<Vec<Libration>> {
    if profile.radii.len() < 2 {
        return Err(Error::InsufficientData("root search needs at least two grid points".into()));
    }
    if !(refine_tol > 0.0) {
        return Err(Error::Domain(format!("refine tolerance must be positive, got {refine_tol}")));
    }
    let model = &profile.model;
    let tol = profile.quad_tolerance;
    let delta = 1e-12 * model.width();
    let f = |r: f64| evaluate_net(model, r, tol);

    let mut samples: Vec<(f64, f64)> = Vec::new();
    let edges = edge_radii(model);
    for i in 0..profile.radii.len() {
        let r = profile.radii[i];
        if i > 0 {
            let prev = profile.radii[i - 1];
            for &e in edges.iter().filter(|&&e| e - delta > prev && e + delta < r) {
                samples.push((e - delta, f(e - delta)?));
                samples.push((e + delta, f(e + delta)?));
            }
        }
        samples.push((r, profile.net_force[i]));
    }

    let mut roots = Vec::new();
    for w in samples.windows(2) {
        let ((mut a, mut fa), (mut b, mut fb)) = (w[0], w[1]);
        if fa == 0.0 {
            roots.push(a);
            continue;
        }
        if fa * fb >= 0.0 {
            continue;
        }
        while b - a > refine_tol {
            let mut m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            let fm = match f(m) {
                Ok(v) => v,
                Err(Error::Singular(_)) => {
                    m = a + 0.4999 * (b - a);
                    f(m)?
                }
                Err(e) => return Err(e),
            };
            if fm == 0.0 {
                a = m;
                b = m;
                fa = 0.0;
                fb = 0.0;
                break;
            }
            if (fm > 0.0) == (fa > 0.0) {
                a = m;
                fa = fm;
            } else {
                b = m;
                fb = fm;
            }
        }
        let r = if fa == fb { a } else { a - fa * (b - a) / (fb - fa) };
        roots.push(r.clamp(a, b));
    }
    if let Some(&(r, fr)) = samples.last() {
        if fr == 0.0 {
            roots.push(r);
        }
    }

    let h = refine_tol * 10.0;
    let fd_tol = tol.min(1e-12);
    roots
        .into_iter()
        .map(|r| {
            let slope = evaluate_net(model, r + h, fd_tol)? - evaluate_net(model, r - h, fd_tol)?;
            let stability = if slope < 0.0 { Stability::Stable } else { Stability::Unstable };
            Ok(Libration { radius: r, stability })
        })
        .collect()
}
