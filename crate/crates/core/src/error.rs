//! Crate-wide error type.

use thiserror::Error;

#[derive(Error, Debug)]
pub enum Error {
    /// A text input could not be parsed; carries the 1-based line number.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// An atom or parameter violates a structural invariant.
    #[error("invalid data: {0}")]
    InvalidData(String),

    /// A caller-supplied parameter is out of range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Two sphere functions sampled on different grids were combined.
    #[error("sphere grid mismatch: {0}")]
    GridMismatch(String),

    /// Two images or landscapes with different geometry were combined.
    #[error("geometry mismatch: {0}")]
    GeometryMismatch(String),

    /// A size-limited routine was fed too large an input.
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),

    /// Weight expansion for sliced Wasserstein failed.
    #[error("weight expansion infeasible: {0}")]
    WeightExpansion(String),

    /// Labelings of different lengths were compared.
    #[error("length mismatch: {0}")]
    LengthMismatch(String),

    /// Correlation of a matrix with zero variance in its upper triangle.
    #[error("zero variance in distance matrix entries")]
    ZeroVariance,

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
