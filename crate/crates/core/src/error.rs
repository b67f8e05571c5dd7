use thiserror::Error;

/// Errors surfaced by every fallible operation in the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("distribution has zero mean; size-biasing is undefined")]
    ZeroMean,

    #[error("support has an internal gap at {at}")]
    GappedSupport { at: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("coupling carries no conditional law for Z")]
    MissingSlack,

    #[error("{what} exceeds cap {limit}")]
    CapExceeded { what: &'static str, limit: u64 },

    #[error("Poincaré quotient denominator is singular: {0}")]
    SingularDenominator(String),

    #[error("no oracle available: {0}")]
    OracleUnavailable(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

/// Range helpers shared by the parameter checks.
pub(crate) fn check_positive(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::param(name, format!("must be finite and > 0, got {v}")))
    }
}

pub(crate) fn check_non_negative(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::param(name, format!("must be finite and >= 0, got {v}")))
    }
}

pub(crate) fn check_unit_open_closed(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 && v <= 1.0 {
        Ok(())
    } else {
        Err(Error::param(name, format!("must lie in (0, 1], got {v}")))
    }
}
