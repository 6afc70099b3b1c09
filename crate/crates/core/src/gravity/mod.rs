//! Gravitational field of the planet and the flat ring.

mod annulus;
mod edge;
mod profile;
mod wire;

pub use annulus::{annulus_potential, annulus_radial_force, annulus_radial_force_with_error};
pub use edge::{edge_asymptotics_fit, log_slope_fit, EdgeFit};
pub use profile::{find_librations, net_radial_profile, Libration, RadialForceProfile, Stability};
pub use wire::{ring_wire_force_agm, wire_kernel, wire_potential_kernel};

use crate::error::{Error, Result};
use crate::model::{Constants, RingModel};
use crate::vec2::Vec2;

/// Default relative tolerance for ring quadratures.
pub const DEFAULT_QUAD_TOL: f64 = 1e-10;

/// Planet attraction `-M X / |X|^3`.
pub fn saturn_force(model: &RingModel, x: Vec2) -> Result<Vec2> {
    let r2 = x.norm_sq();
    if r2 == 0.0 {
        return Err(Error::Singular("planet force evaluated at the origin".into()));
    }
    let r = r2.sqrt();
    Ok(x * (-Constants::G * model.saturn_mass / (r2 * r)))
}

/// Radial component of [`saturn_force`] at radius `r`.
pub fn saturn_radial(model: &RingModel, r: f64) -> Result<f64> {
    if r == 0.0 {
        return Err(Error::Singular("planet force evaluated at the origin".into()));
    }
    Ok(-Constants::G * model.saturn_mass / (r * r))
}

/// An axisymmetric radial force law, positive outward.
pub trait RadialField: Sync {
    fn radial_force(&self, r: f64) -> f64;
}

/// The field that is identically zero.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoField;

impl RadialField for NoField {
    fn radial_force(&self, _r: f64) -> f64 {
        0.0
    }
}

impl<F: Fn(f64) -> f64 + Sync> RadialField for F {
    fn radial_force(&self, r: f64) -> f64 {
        self(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::DensityProfile;

    fn planet(m: f64) -> RingModel {
        RingModel::new(m, 1.0, 2.0, DensityProfile::zero()).unwrap()
    }

    #[test]
    fn saturn_examples() {
        assert_eq!(saturn_force(&planet(1.0), Vec2::new(1.0, 0.0)).unwrap(), Vec2::new(-1.0, 0.0));
        assert_eq!(saturn_force(&planet(4.0), Vec2::new(0.0, 2.0)).unwrap(), Vec2::new(0.0, -1.0));
        assert_eq!(saturn_force(&planet(1.0), Vec2::new(-1.0, 0.0)).unwrap(), Vec2::new(1.0, 0.0));
        assert!(matches!(saturn_force(&planet(1.0), Vec2::ZERO), Err(Error::Singular(_))));
    }
}
