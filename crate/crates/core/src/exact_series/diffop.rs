use std::collections::BTreeMap;

use num_complex::{Complex, Complex64};
use num_traits::{One, ToPrimitive, Zero};

use super::{CRational, PowerSeries, Rational};
use crate::poly::{Exponent, Poly};

/// `Σ_n k^{−n} p_n(i∂)`, a formal series of constant-coefficient operators.
///
/// Acting on distributions it follows `⟨p(∂)A, φ⟩ = ⟨A, p(−∂)φ⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiffOpSeries {
    nvars: usize,
    max_order: u32,
    terms: BTreeMap<u32, Poly<CRational>>,
}

fn to_complex(c: &Rational) -> CRational {
    Complex::new(c.clone(), Rational::zero())
}

/// `i^n` as an exact complex rational.
pub fn i_pow(n: u32) -> CRational {
    let (one, zero) = (Rational::one(), Rational::zero());
    match n % 4 {
        0 => Complex::new(one, zero),
        1 => Complex::new(zero, one),
        2 => Complex::new(-one, zero),
        _ => Complex::new(zero, -one),
    }
}

pub fn crational_to_c64(c: &CRational) -> Complex64 {
    Complex64::new(c.re.to_f64().unwrap_or(f64::NAN), c.im.to_f64().unwrap_or(f64::NAN))
}

impl DiffOpSeries {
    pub fn identity(nvars: usize, max_order: u32) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(0, Poly::one(nvars));
        DiffOpSeries { nvars, max_order, terms }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Highest operator order that is known (beyond it the series is unknown,
    /// not zero).
    pub fn max_order(&self) -> u32 {
        self.max_order
    }

    /// Symbol `p_n`; zero if absent.
    pub fn symbol(&self, n: u32) -> Poly<CRational> {
        self.terms.get(&n).cloned().unwrap_or_else(|| Poly::zero(self.nvars))
    }

    /// `p_n(i∂) = Σ_α c_α i^{|α|} ∂^α`, returned as `(α, c_α i^{|α|})`.
    pub fn derivative_terms(&self, n: u32) -> Vec<(Exponent, CRational)> {
        self.symbol(n)
            .terms()
            .map(|(e, c)| (e.clone(), c.clone() * i_pow(e.iter().sum())))
            .collect()
    }

    /// Composition, i.e. the Cauchy product of symbol series.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let max_order = self.max_order.min(other.max_order);
        let mut terms = BTreeMap::new();
        for n in 0..=max_order {
            let mut acc = Poly::zero(self.nvars);
            for l in 0..=n {
                let (a, b) = (self.symbol(l), other.symbol(n - l));
                if !a.is_zero() && !b.is_zero() {
                    acc = &acc + &(&a * &b);
                }
            }
            if !acc.is_zero() {
                terms.insert(n, acc);
            }
        }
        DiffOpSeries { nvars: self.nvars, max_order, terms }
    }
}

/// Degree-`n` Taylor part of `s` becomes the order-`n` symbol.
pub fn to_diff_op(s: &PowerSeries) -> DiffOpSeries {
    let mut terms = BTreeMap::new();
    for n in 0..=s.order() {
        let part = s.degree_part(n);
        if !part.is_zero() {
            terms.insert(n, part.map_coeffs(to_complex));
        }
    }
    DiffOpSeries { nvars: s.nvars(), max_order: s.order(), terms }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn identity_and_odd_term() {
        let op = to_diff_op(&PowerSeries::one(1, 4));
        assert_eq!(op, DiffOpSeries::identity(1, 4));

        // X ↦ i∂
        let x = PowerSeries::univariate(&[r(0, 1), r(1, 1)], 3);
        let op = to_diff_op(&x);
        let t = op.derivative_terms(1);
        assert_eq!(t, vec![(vec![1], i_pow(1))]);
    }

    #[test]
    fn quadratic_symbol_becomes_minus_second_derivative() {
        let s = PowerSeries::univariate(&[r(0, 1), r(0, 1), r(1, 6)], 4);
        let t = to_diff_op(&s).derivative_terms(2);
        assert_eq!(t, vec![(vec![2], Complex::new(r(-1, 6), r(0, 1)))]);
    }

    #[test]
    fn compose_matches_series_product() {
        let a = PowerSeries::univariate(&[r(1, 1), r(2, 1), r(1, 3)], 5);
        let b = PowerSeries::univariate(&[r(1, 1), r(0, 1), r(-1, 2), r(5, 1)], 5);
        assert_eq!(to_diff_op(&a).compose(&to_diff_op(&b)), to_diff_op(&a.multiply(&b)));
    }
}
