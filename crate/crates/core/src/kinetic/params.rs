use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Distribution of particle masses, before normalisation to the ring mass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum MassSpectrum {
    #[default]
    Single,
    /// Density `∝ m^exponent` on `[m_min, m_max]`.
    PowerLaw {
        m_min: f64,
        m_max: f64,
        #[serde(default = "default_exponent")]
        exponent: f64,
    },
}

fn default_exponent() -> f64 {
    -3.0
}

impl MassSpectrum {
    pub fn validate(&self) -> Result<()> {
        match *self {
            MassSpectrum::Single => Ok(()),
            MassSpectrum::PowerLaw { m_min, m_max, exponent } => {
                if !(m_min > 0.0) || !(m_min <= m_max) || !m_max.is_finite() || !exponent.is_finite() {
                    Err(Error::Config(format!("power-law masses need 0 < m_min <= m_max, got [{m_min}, {m_max}]")))
                } else {
                    Ok(())
                }
            }
        }
    }

    /// One draw by inverse transform.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        match *self {
            MassSpectrum::Single => 1.0,
            MassSpectrum::PowerLaw { m_min, m_max, exponent } => {
                let u: f64 = rng.random();
                if m_min == m_max {
                    return m_min;
                }
                let k = exponent + 1.0;
                if k.abs() < 1e-12 {
                    m_min * (m_max / m_min).powf(u)
                } else {
                    let (a, b) = (m_min.powf(k), m_max.powf(k));
                    (a + u * (b - a)).powf(1.0 / k)
                }
            }
        }
    }
}

/// Hard-disc collision model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CollisionParams {
    #[serde(default = "default_restitution")]
    pub restitution: f64,
    #[serde(default = "default_particle_radius")]
    pub particle_radius: f64,
    #[serde(default)]
    pub mass_spectrum: MassSpectrum,
    /// Side of the square collision cells.
    #[serde(default = "default_cell_size")]
    pub cell_size: f64,
}

fn default_restitution() -> f64 {
    0.9
}

fn default_particle_radius() -> f64 {
    1e-3
}

fn default_cell_size() -> f64 {
    0.05
}

impl Default for CollisionParams {
    fn default() -> Self {
        Self {
            restitution: default_restitution(),
            particle_radius: default_particle_radius(),
            mass_spectrum: MassSpectrum::Single,
            cell_size: default_cell_size(),
        }
    }
}

impl CollisionParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.restitution) {
            return Err(Error::Config(format!("restitution must lie in [0, 1], got {}", self.restitution)));
        }
        if !(self.particle_radius >= 0.0) || !self.particle_radius.is_finite() {
            return Err(Error::Config(format!("particle radius must be >= 0, got {}", self.particle_radius)));
        }
        if !(self.cell_size >= 2.0 * self.particle_radius) || !(self.cell_size > 0.0) {
            return Err(Error::Config(format!(
                "cell size {} is smaller than a particle diameter {}",
                self.cell_size,
                2.0 * self.particle_radius
            )));
        }
        self.mass_spectrum.validate()
    }

    /// Collision cross-section of two discs (a length in two dimensions).
    pub fn cross_section(&self) -> f64 {
        4.0 * self.particle_radius
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn power_law_stays_in_range_and_skews_low() {
        let s = MassSpectrum::PowerLaw { m_min: 1.0, m_max: 10.0, exponent: -3.0 };
        let mut rng = stream(1, &[]);
        let draws: Vec<f64> = (0..20_000).map(|_| s.sample(&mut rng)).collect();
        assert!(draws.iter().all(|m| (1.0..=10.0).contains(m)));
        // P(m < 2) = (1 - 2^-2) / (1 - 10^-2)
        let frac = draws.iter().filter(|m| **m < 2.0).count() as f64 / draws.len() as f64;
        assert!((frac - 0.75 / 0.99).abs() < 0.02);
    }

    #[test]
    fn cells_must_hold_a_disc() {
        let p = CollisionParams { cell_size: 1e-3, ..Default::default() };
        assert!(matches!(p.validate(), Err(Error::Config(_))));
        let p = CollisionParams { restitution: 1.2, ..Default::default() };
        assert!(p.validate().is_err());
    }

    #[test]
    fn spectrum_json_forms() {
        let s: MassSpectrum = serde_json::from_str(r#""single""#).unwrap();
        assert_eq!(s, MassSpectrum::Single);
        let s: MassSpectrum = serde_json::from_str(r#"{"power_law":{"m_min":1,"m_max":2}}"#).unwrap();
        assert_eq!(s, MassSpectrum::PowerLaw { m_min: 1.0, m_max: 2.0, exponent: -3.0 });
    }
}
