use thiserror::Error;

/// Errors raised by loss construction, optimization setup and data ingestion.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// An auxiliary function term left the representable range.
    #[error("term `{term}` saturated at x = {x} (value {value})")]
    Saturated {
        term: &'static str,
        x: f64,
        value: f64,
    },

    /// The near-zero quadratic has a non-positive curvature coefficient.
    #[error("loss is not strictly convex at the origin: quadratic coefficient a = {a}, offset b = {b}")]
    FlatAtOrigin { a: f64, b: f64 },

    /// A sampled spot check on a user supplied function contract failed.
    #[error("contract check `{check}` failed at x = {x}")]
    ContractViolation { check: &'static str, x: f64 },

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("non-finite sample at position {index}")]
    NonFinite { index: usize },

    #[error("input error: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite and positive",
        })
    }
}
