//! Error type shared by every module in the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    /// Matrix or state payload has the wrong number of entries.
    #[error("wrong entry count: expected {expected}, got {got}")]
    WrongLength { expected: usize, got: usize },

    #[error("non-finite entry in numeric input")]
    NonFinite,

    #[error("matrix is not unitary: residual {residual:.3e} exceeds {tolerance:.3e}")]
    NotUnitary { residual: f64, tolerance: f64 },

    #[error("matrix is not Hermitian: residual {residual:.3e} exceeds {tolerance:.3e}")]
    NotHermitian { residual: f64, tolerance: f64 },

    #[error("state is not normalized: |norm - 1| = {deviation:.3e}")]
    NotNormalized { deviation: f64 },

    /// Self-fidelity variance sits below the variance floor, so correlation
    /// quantities are undefined (e.g. one input is a global phase).
    #[error("degenerate readout: self-fidelity variance {variance:.3e} is below the floor")]
    DegenerateReadout { variance: f64 },

    #[error("eigensolver failed to converge")]
    ConvergenceFailure,

    #[error("out of range: {0}")]
    OutOfRange(String),

    #[error("rotation axis is not a unit vector: |norm - 1| = {deviation:.3e}")]
    InvalidAxis { deviation: f64 },

    #[error("grid too small: {rows}x{cols} (need at least 2x2)")]
    GridTooSmall { rows: usize, cols: usize },

    #[error("ensemble needs at least {min} samples, got {got}")]
    TooFewSamples { got: usize, min: usize },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}
