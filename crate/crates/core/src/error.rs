//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Two sequences that must have equal length do not.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// An argument is out of its documented range.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// A node has zero absolute degree where a positive degree is required.
    #[error("node {node} has zero degree; operator is undefined")]
    DegenerateDegree { node: usize },

    /// No usable anchor information (e.g. U·a = 0).
    #[error("degenerate anchors: {0}")]
    DegenerateAnchors(String),

    /// An iterative solver stopped without reaching its tolerance.
    #[error("solver did not converge: residual {residual:.3e} after {iterations} iterations")]
    Convergence { residual: f64, iterations: usize },

    /// Problem size exceeds a documented limit.
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),
}

pub type Result<T> = std::result::Result<T, Error>;
