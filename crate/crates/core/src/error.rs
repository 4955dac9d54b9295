use thiserror::Error;

/// Errors raised by the scheduler, optimizer, problem and runner layers.
///
/// Divergence of a run is not an error; it is recorded in the trace.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid metric {0}: scheduler metrics must be finite")]
    InvalidMetric(f64),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("index {index} out of range for {len} components")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("step {t} out of range 0..={total}")]
    StepOutOfRange { t: usize, total: usize },

    #[error("mismatched pairing: {0}")]
    Pairing(String),

    #[error("missing {0}")]
    Missing(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidConfig(msg.into()))
}
