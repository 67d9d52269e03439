use alloc::string::String;

/// Errors raised by the opposition, mining, fuzzy and benchmark routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A value lies outside the set on which the operation is defined.
    #[error("domain error: {value} {reason}")]
    Domain { value: f64, reason: &'static str },

    /// A running range collapsed to a single value where a spread is required.
    #[error("degenerate range: min == max == {0}")]
    DegenerateRange(f64),

    #[error("insufficient data: need at least {needed} rows, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    /// Evaluation hit a singularity of the function (for example `1/x` at 0).
    #[error("pole at x = {0}")]
    Pole(f64),

    /// An analytic inverse failed its round-trip validation.
    #[error("inversion failed for y = {y}: residual {residual}")]
    Inversion { y: f64, residual: f64 },

    #[error("non-finite value: {0}")]
    NonFinite(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;
