//! Error type shared by every module.

use thiserror::Error;

/// Failures raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed numeric input or inconsistent shapes.
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// The feedback profile violates its structural invariants.
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    /// An update strategy cannot be applied to the given profile.
    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),
    /// A computed subspace had the wrong dimension (a measure-zero event for Gaussian channels).
    #[error("degenerate channel: {0}")]
    DegenerateChannel(String),
    /// The operation is only defined on a subset of instances.
    #[error("unsupported case: {0}")]
    UnsupportedCase(String),
    /// An enumeration would exceed its guard.
    #[error("unsupported size: {0}")]
    UnsupportedSize(String),
    /// The operation was called on an object in the wrong state.
    #[error("invalid state: {0}")]
    InvalidState(String),
    /// The starting point of a design is not feasible.
    #[error("infeasible: {0}")]
    Infeasible(String),
    /// Configuration file problems.
    #[error("config error: {0}")]
    Config(String),
    /// Filesystem errors.
    #[error(transparent)]
    Io(#[from] std::io::Error),
    /// JSON (de)serialization errors.
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    /// CSV writer errors.
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Result alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;
