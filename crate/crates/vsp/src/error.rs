//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by matrix I/O, numerical routines, and model generators.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input file; `line` is 1-based.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// Shapes of two objects that must agree do not.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A caller-supplied argument violates a precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Scaling statistics are undefined for an all-zero matrix.
    #[error("cannot scale zero matrix")]
    ZeroMatrix,

    /// A singular value needed for recentering is (numerically) zero.
    #[error("recentering undefined at rank deficiency")]
    RankDeficient,

    /// A row of the topic contrast matrix has zero l1 norm.
    #[error("degenerate topic {0}")]
    DegenerateTopic(usize),

    /// A Bernoulli mean exceeds 1; clipping would silently bias the model.
    #[error("edge probability {p} > 1 at entry ({i}, {j})")]
    ProbabilityOverflow { i: usize, j: usize, p: f64 },

    /// Kurtosis (or another moment ratio) is undefined for this distribution.
    #[error("degenerate distribution: {0}")]
    DegenerateDistribution(String),

    /// A dense materialization or exhaustive enumeration would be too large.
    #[error("size guard exceeded: {0}")]
    SizeGuard(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
