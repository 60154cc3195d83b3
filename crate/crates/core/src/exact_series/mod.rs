//! Exact rational arithmetic, Bernoulli numbers, truncated power series of
//! the analytic germs, differential-operator series and Abel-summed power sums.

mod bernoulli;
mod diffop;
mod lerch;
mod series;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::Ratio;
use thiserror::Error;

pub use bernoulli::{bernoulli_number, bernoulli_polynomial, binomial};
pub use diffop::{crational_to_c64, i_pow, to_diff_op, DiffOpSeries};
pub use lerch::{lerch_s, lerch_s_at, CValue, RootOfUnity};
pub use series::{germ_taylor, is_even, sinc_series, Germ, PowerSeries};

/// Exact rational, always in lowest terms with positive denominator.
pub type Rational = Ratio<BigInt>;
/// Complex number with rational real and imaginary parts.
pub type CRational = Complex<Rational>;

pub const DEFAULT_ORDER: u32 = 16;
pub const MAX_ORDER: u32 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("unknown germ {0:?}")]
    UnknownGerm(String),
    #[error("series has zero constant term")]
    ZeroConstantTerm,
    #[error("square root needs constant term 1")]
    ConstantTermNotOne,
    #[error("truncation order {0} exceeds the maximum of 64")]
    OrderTooLarge(u32),
    #[error("ζ = 1 has no Abel-summed power sum; use the Bernoulli route")]
    TrivialRoot,
}

/// Convenience constructor used throughout the crate.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}
