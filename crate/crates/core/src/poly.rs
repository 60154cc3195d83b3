//! Sparse multivariate polynomials over a generic coefficient ring.
//!
//! Used with `f64` coefficients for test functions, with exact rationals for
//! quasi-polynomials and power series, and with complex rationals for
//! differential-operator symbols.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{FromPrimitive, One, Zero};

/// Coefficient ring for [`Poly`].
pub trait Coeff:
    Clone
    + fmt::Debug
    + PartialEq
    + Zero
    + One
    + FromPrimitive
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
}

impl<T> Coeff for T where
    T: Clone
        + fmt::Debug
        + PartialEq
        + Zero
        + One
        + FromPrimitive
        + Add<Output = T>
        + Sub<Output = T>
        + Mul<Output = T>
        + Neg<Output = T>
{
}

/// Exponent vector of a monomial.
pub type Exponent = Vec<u32>;

#[derive(Clone, Debug, PartialEq)]
pub struct Poly<T> {
    nvars: usize,
    terms: BTreeMap<Exponent, T>,
}

impl<T: Coeff> Poly<T> {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: T) -> Self {
        Self::monomial(nvars, vec![0; nvars], c)
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, T::one())
    }

    pub fn monomial(nvars: usize, exp: Exponent, c: T) -> Self {
        assert_eq!(exp.len(), nvars, "exponent length must match variable count");
        let mut p = Self::zero(nvars);
        p.add_term(exp, c);
        p
    }

    /// The coordinate function `x_i`.
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(nvars, e, T::one())
    }

    /// Build from `(exponent, coefficient)` pairs; repeated exponents accumulate.
    pub fn from_terms<I: IntoIterator<Item = (Exponent, T)>>(nvars: usize, terms: I) -> Self {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &T)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exp: &[u32]) -> T {
        self.terms.get(exp).cloned().unwrap_or_else(T::zero)
    }

    pub fn add_term(&mut self, exp: Exponent, c: T) {
        assert_eq!(exp.len(), self.nvars);
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&exp) {
            Some(v) => {
                let s = v.clone() + c;
                if s.is_zero() {
                    self.terms.remove(&exp);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(exp, c);
            }
        }
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// Homogeneous component of total degree `d`.
    pub fn homogeneous_part(&self, d: u32) -> Self {
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e.iter().sum::<u32>() == d)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    /// Drop all monomials of total degree above `d`.
    pub fn truncate(&self, d: u32) -> Self {
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e.iter().sum::<u32>() <= d)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &T) -> Self {
        Self::from_terms(
            self.nvars,
            self.terms.iter().map(|(e, v)| (e.clone(), v.clone() * c.clone())),
        )
    }

    pub fn map_coeffs<U: Coeff>(&self, f: impl Fn(&T) -> U) -> Poly<U> {
        Poly::from_terms(self.nvars, self.terms.iter().map(|(e, c)| (e.clone(), f(c))))
    }

    /// Partial derivative with respect to `x_i`.
    pub fn derivative(&self, i: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut ne = e.clone();
            ne[i] -= 1;
            out.add_term(ne, c.clone() * T::from_u32(e[i]).expect("exponent fits coefficient ring"));
        }
        out
    }

    /// Mixed partial `∂^α`.
    pub fn derivative_multi(&self, alpha: &[u32]) -> Self {
        let mut p = self.clone();
        for (i, &a) in alpha.iter().enumerate() {
            for _ in 0..a {
                p = p.derivative(i);
            }
        }
        p
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one(self.nvars);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Substitute `x_i ↦ subs[i]`, where each `subs[i]` is a polynomial in a new
    /// variable set.
    pub fn compose(&self, subs: &[Poly<T>]) -> Poly<T> {
        assert_eq!(subs.len(), self.nvars);
        let target = subs.first().map(|p| p.nvars).unwrap_or(0);
        let mut cache: Vec<Vec<Poly<T>>> = subs.iter().map(|s| vec![Poly::one(s.nvars)]).collect();
        let mut out = Poly::zero(target);
        for (e, c) in &self.terms {
            let mut m = Poly::constant(target, c.clone());
            for (i, &k) in e.iter().enumerate() {
                while cache[i].len() <= k as usize {
                    let next = cache[i].last().expect("seeded") * &subs[i];
                    cache[i].push(next);
                }
                m = &m * &cache[i][k as usize];
            }
            out = &out + &m;
        }
        out
    }

    /// Evaluate with an arbitrary scalar type the coefficients embed into.
    pub fn eval_with<S>(&self, x: &[S], embed: impl Fn(&T) -> S) -> S
    where
        S: Clone + Zero + One + Mul<Output = S> + Add<Output = S>,
    {
        assert_eq!(x.len(), self.nvars);
        let mut total = S::zero();
        for (e, c) in &self.terms {
            let mut m = embed(c);
            for (xi, &k) in x.iter().zip(e) {
                for _ in 0..k {
                    m = m * xi.clone();
                }
            }
            total = total + m;
        }
        total
    }
}

impl<T: Coeff> Poly<T> {
    pub fn eval(&self, x: &[T]) -> T {
        self.eval_with(x, |c| c.clone())
    }
}

impl Poly<f64> {
    /// Horner-free evaluation using cached powers; exact enough for the
    /// degrees used here (≤ 30).
    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.nvars);
        let mut total = 0.0;
        for (e, c) in &self.terms {
            let mut m = *c;
            for (xi, &k) in x.iter().zip(e) {
                m *= xi.powi(k as i32);
            }
            total += m;
        }
        total
    }

    /// Sum of absolute coefficients.
    pub fn l1_norm(&self) -> f64 {
        self.terms.values().map(|c| c.abs()).sum()
    }
}

impl<'a, T: Coeff> Add for &'a Poly<T> {
    type Output = Poly<T>;
    fn add(self, rhs: &'a Poly<T>) -> Poly<T> {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl<'a, T: Coeff> Sub for &'a Poly<T> {
    type Output = Poly<T>;
    fn sub(self, rhs: &'a Poly<T>) -> Poly<T> {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }
}

impl<'a, T: Coeff> Mul for &'a Poly<T> {
    type Output = Poly<T>;
    fn mul(self, rhs: &'a Poly<T>) -> Poly<T> {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = Poly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                let e: Exponent = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1.clone() * c2.clone());
            }
        }
        out
    }
}

impl<T: Coeff> Neg for &Poly<T> {
    type Output = Poly<T>;
    fn neg(self) -> Poly<T> {
        self.map_coeffs(|c| -c.clone())
    }
}
