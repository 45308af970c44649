use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("element count must be odd and at least {min}, got {got}")]
    ElementCount { got: usize, min: usize },

    #[error("no sign change of the coverage residual in [{lo}, {hi}]")]
    NoRootInBracket { lo: f64, hi: f64 },

    #[error("dimension mismatch: expected {expected}, got {got} ({what})")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("quadrature produced a non-finite partial sum after {steps} steps")]
    QuadratureDiverged { steps: usize },

    #[error("element {index} has no neighbouring element")]
    NoNeighbour { index: i32 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

/// Rejects NaN / infinite inputs with a named parameter error.
pub(crate) fn ensure_finite(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::invalid(name, format!("must be finite, got {value}")))
    }
}
