use thiserror::Error;

/// Errors produced by the EL machinery and the experiment drivers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("origin is not in the interior of the convex hull of the points")]
    HullViolation,
    #[error("solver did not converge after {iterations} iterations (gradient norm {gradient_norm:.3e})")]
    NonConvergence { iterations: usize, gradient_norm: f64 },
    #[error("profile optimization did not converge: {0}")]
    ProfileNonConvergence(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("block length {b} outside [1, {n}]")]
    BlockLength { b: usize, n: usize },
    #[error("argument outside domain: {0}")]
    Domain(String),
    #[error("degenerate sample: {0}")]
    DegenerateSample(String),
    #[error("AR polynomial is not causal (root modulus {min_root_modulus:.6})")]
    NonCausal { min_root_modulus: f64 },
    #[error("invalid weight function: {0}")]
    InvalidWeight(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("calibration table does not cover {0}")]
    Calibration(String),
}

pub type Result<T> = std::result::Result<T, Error>;
