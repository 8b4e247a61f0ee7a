//! Error type shared by all modules of the crate.

use thiserror::Error;

/// Errors reported by polynomial, pencil, oracle and amalgamation routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("constant term must be 1, got {0}")]
    ConstantTermNotOne(String),

    #[error("constant term must be 0, got {0}")]
    ConstantTermNotZero(String),

    #[error("polynomial vanishes at the origin")]
    ZeroAtOrigin,

    #[error("homogenization degree {degree} below polynomial degree {poly_degree}")]
    DegreeTooSmall { degree: u32, poly_degree: u32 },

    #[error("matrix is not orthogonal (residual {0:.3e})")]
    NotOrthogonal(f64),

    #[error("matrix is not positive semidefinite")]
    NotPsd,

    #[error("degree {got} exceeds bound {bound}")]
    DegreeBound { got: u32, bound: u32 },

    #[error("residual check failed: {0}")]
    Residual(String),

    #[error("invalid anchor: {0}")]
    InvalidAnchor(String),

    #[error("hyperbolicity check failed: {0}")]
    NotHyperbolic(String),

    #[error("shared parts of the amalgamation factors disagree: {0}")]
    SharedMismatch(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
