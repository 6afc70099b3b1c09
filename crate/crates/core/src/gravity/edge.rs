//! Logarithmic growth of the ring force just outside a sharp edge.

use serde::Serialize;

use crate::config::EdgeSide;
use crate::error::{Error, Result};
use crate::model::DensityProfile;
use crate::stats::ols;
use crate::table::Table;

use super::annulus::annulus_radial_force;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgeFit {
    pub edge_radius: f64,
    pub side: EdgeSide,
    pub epsilons: Vec<f64>,
    pub forces: Vec<f64>,
    /// Force gained per unit of `ln(1/ε)`.
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

impl EdgeFit {
    pub fn fit_value(&self, eps: f64) -> f64 {
        self.intercept + self.slope * (1.0 / eps).ln()
    }

    pub fn to_table(&self) -> Table {
        let mut t = Table::new(&["epsilon", "force", "fit_value"]);
        for (&e, &f) in self.epsilons.iter().zip(&self.forces) {
            t.push(vec![e.into(), f.into(), self.fit_value(e).into()]);
        }
        t
    }
}

/// Least-squares line of `forces` against `ln(1/ε)`: `(slope, intercept, r²)`.
pub fn log_slope_fit(epsilons: &[f64], forces: &[f64]) -> Result<(f64, f64, f64)> {
    let x: Vec<f64> = epsilons.iter().map(|e| (1.0 / e).ln()).collect();
    let f = ols(&x, forces)?;
    Ok((f.slope, f.intercept, f.r_squared))
}

/// Samples `|F|` at distance ε outside the chosen support edge and fits it
/// against `ln(1/ε)`.
pub fn edge_asymptotics_fit(density: &DensityProfile, edge: EdgeSide, epsilons: &[f64], tol: f64) -> Result<EdgeFit> {
    if epsilons.len() < 4 {
        return Err(Error::InsufficientData(format!("edge fit needs at least 4 distances, got {}", epsilons.len())));
    }
    if epsilons.iter().any(|e| !(*e > 0.0) || !e.is_finite()) || epsilons.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("edge distances must be positive and strictly ascending".into()));
    }
    let (lo, hi) =
        density.support().ok_or_else(|| Error::Density("edge fit needs a density with nonzero support".into()))?;
    let (first, last) = (epsilons[0], epsilons[epsilons.len() - 1]);
    if last / first < 100.0 * (1.0 - 1e-12) {
        return Err(Error::Domain(format!(
            "edge distances span {:.3} decades, need at least 2",
            (last / first).log10()
        )));
    }
    if last >= (hi - lo) / 10.0 {
        return Err(Error::Domain(format!(
            "largest distance {last} is not below a tenth of the ring width {}",
            hi - lo
        )));
    }
    let edge_radius = match edge {
        EdgeSide::Inner => lo,
        EdgeSide::Outer => hi,
    };
    if edge == EdgeSide::Inner && last >= lo {
        return Err(Error::Domain("inner edge distances must stay at positive radius".into()));
    }
    let forces = epsilons
        .iter()
        .map(|&e| {
            let r = match edge {
                EdgeSide::Inner => lo - e,
                EdgeSide::Outer => hi + e,
            };
            annulus_radial_force(density, r, tol).map(f64::abs)
        })
        .collect::<Result<Vec<_>>>()?;
    let (slope, intercept, r_squared) = log_slope_fit(epsilons, &forces)?;
    Ok(EdgeFit { edge_radius, side: edge, epsilons: epsilons.to_vec(), forces, slope, intercept, r_squared })
}
