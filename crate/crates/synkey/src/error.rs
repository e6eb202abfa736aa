//! Crate-wide error type.

/// Errors reported by the code, source, and benchmark layers.
///
/// Low-level bit/matrix operations panic on dimension misuse instead
/// (programmer error); everything reachable from user input returns one
/// of these variants.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Operand shapes are incompatible.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A matrix does not have the rank an operation requires.
    #[error("rank deficiency: {0}")]
    Rank(String),

    /// An enumeration or table would exceed the configured budget.
    #[error("capacity budget exceeded: {0}")]
    Capacity(String),

    /// A structural parameter is invalid (degrees, sizes, counts).
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// A numeric argument lies outside its admissible range.
    #[error("domain error: {0}")]
    Domain(String),

    /// A text format could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
