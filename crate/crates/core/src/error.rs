use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("improper transfer function: numerator degree {num} exceeds denominator degree {den}")]
    Improper { num: usize, den: usize },

    #[error("invalid transfer function: {0}")]
    InvalidTransferFunction(String),

    #[error("pole at origin: DC gain is undefined")]
    PoleAtOrigin,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A non-finite value entered or left a simulation component.
    #[error("simulation fault: {0}")]
    Fault(String),

    #[error("invalid scenario: {0}")]
    Scenario(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("malformed trace csv at line {line}: {msg}")]
    Csv { line: usize, msg: String },

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn ensure_finite(value: f64, what: &str) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Fault(format!("{what} is not finite ({value})")))
    }
}
