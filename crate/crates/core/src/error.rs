//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    /// A cell that should be numeric failed to parse. Row 1 is the header,
    /// columns are 1-based.
    #[error("parse error at row {row}, column {col}: {detail}")]
    Parse { row: usize, col: usize, detail: String },

    #[error("ragged row {row}: expected {expected} fields, got {got}")]
    RaggedRow { row: usize, expected: usize, got: usize },

    #[error("empty input: no data rows")]
    EmptyInput,

    #[error("unknown channel {0}")]
    UnknownChannel(String),

    #[error("aliasing: tone at {freq_hz} Hz is not below the Nyquist frequency {nyquist_hz} Hz")]
    Aliasing { freq_hz: f64, nyquist_hz: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("insufficient data: need at least {needed} samples, got {got}")]
    InsufficientData { needed: usize, got: usize },

    /// Fewer heartbeats fired than the statistical floor for a throughput
    /// measurement; the result would be meaningless.
    #[error("insufficient measurement: {heartbeats} heartbeats, need at least {minimum}")]
    InsufficientMeasurement { heartbeats: u64, minimum: u64 },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
