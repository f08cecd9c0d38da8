//! Crate-wide error type.
//!
//! Contracts in this crate fail loudly: domain violations, mismatched buffer
//! sizes, and infeasible configurations are reported as typed errors rather
//! than silently clamped.

use thiserror::Error;

/// Errors produced by the simulation core.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A buffer or vector had the wrong length for the requested operation.
    #[error("size error in {what}: expected {expected}, got {got}")]
    Size {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    /// The frame/experiment configuration is internally inconsistent.
    #[error("configuration error: {0}")]
    Config(String),

    /// An iterative numeric routine failed to converge.
    #[error("convergence failure: {0}")]
    Convergence(String),

    /// A least-squares system was rank deficient.
    #[error("degenerate system: {0}")]
    Degenerate(String),

    /// A sample with a non-finite component reached a validated interface.
    #[error("non-finite sample: {0}")]
    NonFinite(String),

    /// Not enough samples to complete calibration or estimation.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// Filesystem failure while reading or writing an artifact.
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Shorthand for a [`Error::Domain`] with a formatted message.
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Shorthand for a [`Error::Config`] with a formatted message.
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
