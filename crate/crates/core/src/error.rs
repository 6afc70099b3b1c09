use thiserror::Error;

use crate::dynamics::RunDiagnostics;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("density error: {0}")]
    Density(String),

    #[error("config parse error: {0}")]
    Parse(String),

    #[error("unknown config key `{key}`{}", suggestion.as_ref().map(|s| format!(" (did you mean `{s}`?)")).unwrap_or_default())]
    UnknownKey { key: String, suggestion: Option<String> },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("singular evaluation: {0}")]
    Singular(String),

    #[error("quadrature did not converge: estimate {estimate:e} with error {error:e} after {evaluations} evaluations")]
    Quadrature { estimate: f64, error: f64, evaluations: usize },

    #[error("quadrature failed at R = {radius}: {source}")]
    QuadratureAt {
        radius: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("coverage error: {0}")]
    Coverage(String),

    #[error("calibration failed: {0}")]
    Calibration(String),

    #[error("run aborted at t = {time}: {reason}")]
    RunAborted { time: f64, reason: String, diagnostics: Box<RunDiagnostics> },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
