//! Asymptotic expansions of `Θ_k` in `1/k`: the DH/`Â`/Duflo series,
//! Euler–Maclaurin closed forms, `ζ`-twisted half-line series, exact-sum
//! oracles and the convergence-order harness.

mod expansion;
mod harness;

use thiserror::Error;

pub use expansion::{
    build_expansion, em_fulllattice, em_fulllattice_coefficients, em_halfline, em_halfline_coefficients,
    fulllattice_sum, fulllattice_sum_with, twisted_halfline_coefficients, twisted_halfline_expansion,
    MAX_EXPANSION_ORDER,
};
pub use harness::{
    exact_vs_expansion, exact_vs_expansion_with, exact_vs_series, fit_order, ls_slope, next_order_target,
    FitSummary, OrderFitReport, EXACT_REL_TOL, LOOKAHEAD,
};

use crate::dist_calc::DistError;
use crate::exact_series::SeriesError;
use crate::models::ModelError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AsymError {
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("order {requested} exceeds the maximum {max}")]
    OrderTooLarge { requested: u32, max: u32 },
    #[error("weight {0} must be even and at least 2")]
    OddWeight(i64),
    #[error("ζ^w = 1: the untwisted half-line series applies instead")]
    TrivialTwist,
    #[error("bad k-ladder: {0}")]
    BadLadder(String),
    #[error("only {nonzero} nonzero errors; a slope needs at least 3")]
    DegenerateFit { nonzero: usize },
    #[error("non-finite value in a convergence report")]
    NonFinite,
    #[error("test function does not decay; no truncation certificate")]
    NoCertificate,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Dist(#[from] DistError),
    #[error(transparent)]
    Series(#[from] SeriesError),
}
