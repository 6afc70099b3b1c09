//! Shared domain types: physical constants, the ring density profile, moons
//! and the ring model itself.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vec2::Vec2;

/// Code-unit constants. Both are exactly one.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Constants;

impl Constants {
    pub const G: f64 = 1.0;
    pub const KB: f64 = 1.0;

    pub fn gravitational_constant(self) -> f64 {
        Self::G
    }

    pub fn boltzmann_constant(self) -> f64 {
        Self::KB
    }
}

/// Axisymmetric surface density, piecewise linear between radial knots and
/// zero outside `[knots[0], knots[last]]`.
///
/// Fields are public so scenario files can be loaded before validation;
/// [`DensityProfile::new`] and [`DensityProfile::validate`] enforce the
/// invariants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensityProfile {
    pub knots: Vec<f64>,
    pub values: Vec<f64>,
}

impl DensityProfile {
    pub fn new(knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let p = Self { knots, values };
        p.validate()?;
        Ok(p)
    }

    /// Profile that vanishes everywhere.
    pub fn zero() -> Self {
        Self { knots: Vec::new(), values: Vec::new() }
    }

    pub fn uniform(inner: f64, outer: f64, sigma: f64) -> Result<Self> {
        Self::new(vec![inner, outer], vec![sigma, sigma])
    }

    /// Uniform profile on `[inner, outer]` carrying total mass `mass`.
    pub fn uniform_with_mass(inner: f64, outer: f64, mass: f64) -> Result<Self> {
        Self::uniform(inner, outer, mass / (PI * (outer * outer - inner * inner)))
    }

    pub fn validate(&self) -> Result<()> {
        if self.knots.len() != self.values.len() {
            return Err(Error::Density(format!("{} knots but {} values", self.knots.len(), self.values.len())));
        }
        if self.knots.len() == 1 {
            return Err(Error::Density("a profile needs at least two knots".into()));
        }
        if let Some(i) = self.knots.iter().position(|k| !k.is_finite() || *k < 0.0) {
            return Err(Error::Density(format!("knot {i} = {} is not a finite non-negative radius", self.knots[i])));
        }
        if let Some(i) = self.knots.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::Density(format!(
                "knots must be strictly ascending (knot {} = {} follows {})",
                i + 1,
                self.knots[i + 1],
                self.knots[i]
            )));
        }
        if let Some(i) = self.values.iter().position(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Density(format!("density at knot {i} is {} (must be >= 0)", self.values[i])));
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == 0.0)
    }

    /// Radial extent `[first knot, last knot]`, if any.
    pub fn support(&self) -> Option<(f64, f64)> {
        Some((*self.knots.first()?, *self.knots.last()?))
    }

    pub fn eval(&self, r: f64) -> f64 {
        let Some((lo, hi)) = self.support() else {
            return 0.0;
        };
        if r < lo || r > hi {
            return 0.0;
        }
        let i = self.knots.partition_point(|k| *k <= r);
        if i == 0 {
            return self.values[0];
        }
        let j = i - 1;
        if self.knots[j] == r || j + 1 == self.knots.len() {
            return self.values[j];
        }
        let (a, b) = (self.knots[j], self.knots[j + 1]);
        let t = (r - a) / (b - a);
        self.values[j] + t * (self.values[j + 1] - self.values[j])
    }

    /// Minimum density over `[r1, r2]`: the lower bound α of a positive ring.
    pub fn min_on(&self, r1: f64, r2: f64) -> f64 {
        let mut m = self.eval(r1).min(self.eval(r2));
        for (k, v) in self.knots.iter().zip(&self.values) {
            if *k > r1 && *k < r2 {
                m = m.min(*v);
            }
        }
        m
    }

    /// Exact total mass `∫ 2π r σ(r) dr` of the piecewise-linear profile.
    pub fn mass(&self) -> f64 {
        let mut m = 0.0;
        for (w, s) in self.knots.windows(2).zip(self.values.windows(2)) {
            let (a, b) = (w[0], w[1]);
            let (sa, sb) = (s[0], s[1]);
            // ∫_a^b r (sa (b-r) + sb (r-a)) / (b-a) dr
            let h = b - a;
            m += h * (sa * (2.0 * a + b) + sb * (a + 2.0 * b)) / 6.0;
        }
        2.0 * PI * m
    }

    /// Profile with every value multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self { knots: self.knots.clone(), values: self.values.iter().map(|v| v * factor).collect() }
    }

    /// Density discontinuities `(radius, σ(r+) - σ(r-))` at the support ends.
    ///
    /// Interior knots are continuous by construction, so only the two ends
    /// can jump.
    pub fn jumps(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        if let (Some(&k0), Some(&v0)) = (self.knots.first(), self.values.first()) {
            if v0 != 0.0 {
                out.push((k0, v0));
            }
        }
        if let (Some(&kn), Some(&vn)) = (self.knots.last(), self.values.last()) {
            if vn != 0.0 {
                out.push((kn, -vn));
            }
        }
        out
    }

    /// Linear pieces `(r_a, r_b, σ_a, σ_b)`.
    pub fn segments(&self) -> impl Iterator<Item = (f64, f64, f64, f64)> + '_ {
        self.knots.windows(2).zip(self.values.windows(2)).map(|(k, v)| (k[0], k[1], v[0], v[1]))
    }
}

/// Moon on a fixed circular orbit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Moon {
    pub mass: f64,
    pub orbit_radius: f64,
    /// Angular velocity in rad per time unit; negative means retrograde.
    pub angular_velocity: f64,
    #[serde(default)]
    pub phase: f64,
}

impl Moon {
    pub fn position(&self, t: f64) -> Vec2 {
        Vec2::from_polar(self.orbit_radius, self.angular_velocity * t + self.phase)
    }

    /// Angular velocity of a circular orbit of this radius about `central_mass`.
    pub fn keplerian(mass: f64, orbit_radius: f64, central_mass: f64, phase: f64) -> Self {
        let w = (Constants::G * central_mass / orbit_radius.powi(3)).sqrt();
        Self { mass, orbit_radius, angular_velocity: w, phase }
    }
}

/// Central planet plus a flat axisymmetric ring occupying `[R1, R2]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RingModel {
    pub saturn_mass: f64,
    pub inner_radius: f64,
    pub outer_radius: f64,
    pub density: DensityProfile,
    #[serde(default)]
    pub moons: Vec<Moon>,
    #[serde(skip)]
    pub constants: Constants,
}

impl RingModel {
    pub fn new(saturn_mass: f64, inner_radius: f64, outer_radius: f64, density: DensityProfile) -> Result<Self> {
        let m = Self { saturn_mass, inner_radius, outer_radius, density, moons: Vec::new(), constants: Constants };
        m.validate()?;
        Ok(m)
    }

    /// Uniform ring of total mass `ring_mass` on `[inner, outer]`.
    pub fn uniform(saturn_mass: f64, inner: f64, outer: f64, ring_mass: f64) -> Result<Self> {
        Self::new(saturn_mass, inner, outer, DensityProfile::uniform_with_mass(inner, outer, ring_mass)?)
    }

    pub fn with_moons(mut self, moons: Vec<Moon>) -> Self {
        self.moons = moons;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.inner_radius > 0.0) || !self.inner_radius.is_finite() {
            return Err(Error::Geometry(format!("inner radius must be positive, got {}", self.inner_radius)));
        }
        if !(self.inner_radius < self.outer_radius) || !self.outer_radius.is_finite() {
            return Err(Error::Geometry(format!(
                "inner radius {} must be below outer radius {}",
                self.inner_radius, self.outer_radius
            )));
        }
        if !(self.saturn_mass > 0.0) || !self.saturn_mass.is_finite() {
            return Err(Error::Config(format!("central mass must be positive, got {}", self.saturn_mass)));
        }
        self.density.validate()?;
        if let Some((lo, hi)) = self.density.support() {
            let slack = 1e-12 * (self.outer_radius - self.inner_radius);
            if lo < self.inner_radius - slack || hi > self.outer_radius + slack {
                return Err(Error::Density(format!(
                    "density support [{lo}, {hi}] leaves the annulus [{}, {}]",
                    self.inner_radius, self.outer_radius
                )));
            }
        }
        for (i, moon) in self.moons.iter().enumerate() {
            if !(moon.mass > 0.0) {
                return Err(Error::Config(format!("moon {i} mass must be positive, got {}", moon.mass)));
            }
            if !(moon.orbit_radius > 0.0) {
                return Err(Error::Config(format!(
                    "moon {i} orbit radius must be positive, got {}",
                    moon.orbit_radius
                )));
            }
        }
        Ok(())
    }

    pub fn ring_mass(&self) -> f64 {
        self.density.mass()
    }

    pub fn width(&self) -> f64 {
        self.outer_radius - self.inner_radius
    }

    /// Circular-orbit period about the planet alone at radius `r`.
    pub fn kepler_period(&self, r: f64) -> f64 {
        2.0 * PI * (r.powi(3) / (Constants::G * self.saturn_mass)).sqrt()
    }

    /// Copy with the planet, ring and moon masses all multiplied by `factor`.
    pub fn with_masses_scaled(&self, factor: f64) -> Self {
        let mut m = self.clone();
        m.saturn_mass *= factor;
        m.density = m.density.scaled(factor);
        for moon in &mut m.moons {
            moon.mass *= factor;
        }
        m
    }
}
