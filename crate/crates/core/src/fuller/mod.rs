//! Chattering synthesis of the Fuller problem
//!
//! ```text
//! minimise ∫ x² dt,   ẋ = y,   ẏ = u,   |u| <= 1
//! ```
//!
//! The optimal feedback is `u = -sign(x + C y|y|)`. Trajectories reach the
//! origin in finite time after infinitely many switches whose intervals
//! shrink geometrically.

mod calibrate;
mod trajectory;

pub use calibrate::{
    calibrate_fuller_constant, calibrate_self_similar_arc, value_iteration_constant, SelfSimilarArc, ValueIteration,
};
pub use trajectory::{simulate_fuller, switch_ratio, FullerTrajectory, SwitchRatio, Termination};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Feedback law `u = -sign(x + C y|y|)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FullerSynthesis {
    pub switch_coefficient: f64,
    pub control_bound: f64,
    /// Terminal box half-width and root-finding tolerance on switch times.
    pub event_tol: f64,
}

impl FullerSynthesis {
    pub fn new(switch_coefficient: f64, event_tol: f64) -> Result<Self> {
        let s = Self { switch_coefficient, control_bound: 1.0, event_tol };
        s.validate()?;
        Ok(s)
    }

    /// Synthesis with the self-similar switching coefficient.
    pub fn calibrated(event_tol: f64) -> Result<Self> {
        Self::new(calibrate_fuller_constant(1e-15)?, event_tol)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.switch_coefficient > 0.0) || !self.switch_coefficient.is_finite() {
            return Err(Error::Domain(format!("switch coefficient must be positive, got {}", self.switch_coefficient)));
        }
        if self.control_bound != 1.0 {
            return Err(Error::Domain(format!("control bound is fixed at 1, got {}", self.control_bound)));
        }
        if !(self.event_tol > 0.0) {
            return Err(Error::Domain(format!("event tolerance must be positive, got {}", self.event_tol)));
        }
        Ok(())
    }

    /// `x + C y|y|`; positive above the switching curve.
    pub fn switching_function(&self, x: f64, y: f64) -> f64 {
        x + self.switch_coefficient * y * y.abs()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Control {
    Minus,
    Plus,
    Terminal,
}

impl Control {
    pub fn value(self) -> Option<f64> {
        match self {
            Control::Minus => Some(-1.0),
            Control::Plus => Some(1.0),
            Control::Terminal => None,
        }
    }

    fn from_sign(s: f64) -> Self {
        if s > 0.0 {
            Control::Plus
        } else {
            Control::Minus
        }
    }
}

/// Feedback control at `(x, y)`. On the switching curve itself the control
/// that keeps `y` heading to zero is returned.
pub fn fuller_control(state: (f64, f64), synthesis: &FullerSynthesis) -> Control {
    let (x, y) = state;
    if x.abs() < synthesis.event_tol && y.abs() < synthesis.event_tol {
        return Control::Terminal;
    }
    let s = synthesis.switching_function(x, y);
    if s != 0.0 {
        Control::from_sign(-s)
    } else {
        Control::from_sign(-y)
    }
}
