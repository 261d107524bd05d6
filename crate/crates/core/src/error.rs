//! Error type shared by every numerical kernel in the crate.

use thiserror::Error;

/// Errors raised by construction guards and numerical routines.
#[derive(Debug, Error)]
pub enum Error {
    /// Input matrix is not square.
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    /// Symmetry violation exceeds the construction tolerance.
    #[error("matrix is not symmetric: max |a_ij - a_ji| = {violation:.3e} exceeds {tolerance:.3e}")]
    NotSymmetric { violation: f64, tolerance: f64 },

    /// Smallest eigenvalue is not strictly positive.
    #[error("matrix is not positive definite: smallest eigenvalue {min_eigenvalue:.3e}")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    /// Two operands disagree on dimension.
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// A scalar argument is outside its admissible range.
    #[error("invalid parameter {name}: {message}")]
    InvalidParameter { name: &'static str, message: String },

    /// An iteration failed to reach its stopping criterion.
    #[error("{what} did not converge after {iterations} iterations (residual {residual:.3e})")]
    DidNotConverge {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    /// Eigenbasis is ambiguous because of (numerically) repeated eigenvalues.
    #[error("repeated eigenvalues (smallest gap {gap:.3e}): eigenbasis is ambiguous")]
    DegenerateSpectrum { gap: f64 },

    /// A quantity that is positive (semi)definite by theory failed its check.
    #[error("internal consistency violated: {0}")]
    InternalInconsistency(String),

    /// Dual potential requested where the density vanishes.
    #[error("dual potential is undefined: density is not positive at the query point")]
    UndefinedPotential,

    /// Grid does not cover the required span of a marginal.
    #[error("grid coverage check failed: {0}")]
    GridCoverage(String),

    /// Dissimilarity matrix admits no Euclidean embedding.
    #[error("degenerate embedding: no positive eigenvalue in the double-centered matrix")]
    DegenerateEmbedding,

    /// Line search could not produce a finite objective.
    #[error("step size search diverged (objective trace: {trace:?})")]
    StepSize { trace: Vec<f64> },
}

pub type Result<T> = std::result::Result<T, Error>;
