//! Numerical laboratory for flat planetary rings.
//!
//! * [`gravity`]: planet and annulus fields, libration circles, edge
//!   asymptotics.
//! * [`dynamics`]: collision-free particle dynamics in the mean field.
//! * [`kinetic`]: Maxwellian sampling, moments, inelastic collisions and
//!   moment-equation residuals.
//! * [`fuller`]: the chattering synthesis of the Fuller problem.
//!
//! Shared types live in [`model`], [`config`] and [`vec2`].

// Validation uses `!(x > 0.0)` so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod dynamics;
pub mod elliptic;
pub mod error;
pub mod fuller;
pub mod gravity;
pub mod kinetic;
pub mod model;
pub mod quadrature;
pub mod rng;
pub mod stats;
pub mod table;
pub mod vec2;

pub use config::{validate_config, Diagnostic, ScenarioConfig, Severity};
pub use error::{Error, Result};
pub use model::{Constants, DensityProfile, Moon, RingModel};
pub use vec2::Vec2;
