//! Test functions, distributions and their calculus: pairing, rescaling,
//! pushforward, convolution, derivatives, Fourier pairing, and truncated
//! Laurent series in `1/k` with distribution coefficients.
//!
//! Derivatives follow `⟨∂^α D, φ⟩ = (−1)^{|α|}⟨D, ∂^α φ⟩`.

mod distribution;
mod laurent;
pub mod quadrature;
mod testfn;

use thiserror::Error;

pub use distribution::{Distribution, DistributionDoc, Support, SupportDoc, Term, TermDoc};
pub use laurent::LaurentDistSeries;
pub use quadrature::Quad;
pub use testfn::{GaussTerm, Integrand, PlaneWave, TestFunction};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DistError {
    #[error("quadrature did not converge after {nodes} nodes (last residual {residual:e})")]
    Quadrature { nodes: usize, residual: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("quadratic form is not positive definite")]
    NotPositiveDefinite,
    #[error("unbounded support where compact support is required")]
    UnboundedSupport,
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("order {requested} requested but only {available} available")]
    OrderExhausted { requested: u32, available: u32 },
}
