//! Rational polyhedra, quasi-polynomials, piecewise quasi-polynomial
//! multiplicity functions and vector-partition counting. Everything here is
//! exact integer/rational arithmetic.

mod format;
mod linalg;
mod partition;
mod polyhedron;
mod qp;

use thiserror::Error;

pub use format::{FORMAT_NAME, FORMAT_VERSION};
pub use linalg::solve as solve_linear;
pub use partition::{positive_functional, vector_partition, ENUMERATION_LIMIT};
pub use polyhedron::{HalfSpace, Polyhedron};
pub use qp::{
    pqp_diff_zero_on_window, pqp_diff_zero_on_window_with, BoundaryConflict, Piece, PiecewiseQP,
    QuasiPolynomial, WindowCheck,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QpError {
    #[error("period must be at least 1, got {0}")]
    BadPeriod(i64),
    #[error("residue class {0:?} out of range")]
    BadResidue(Vec<i64>),
    #[error("rank mismatch: expected {expected}, got {got}")]
    RankMismatch { expected: usize, got: usize },
    #[error("window must be a bounded polyhedron")]
    UnboundedWindow,
    #[error("weights do not lie in an open half-space; the fibers are not finite")]
    Improper,
    #[error("odd weight: only even weights are admitted")]
    OddWeight,
    #[error("enumeration would visit {0} points (limit 10^7)")]
    EnumerationTooLarge(u128),
    #[error("piecewise quasi-polynomial document: {0}")]
    Format(String),
}
