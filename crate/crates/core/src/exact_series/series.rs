use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{Rational, SeriesError, MAX_ORDER};
use crate::poly::Poly;

/// Truncated multivariate power series with exact rational coefficients.
///
/// Every stored monomial has total degree at most `order`.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerSeries {
    order: u32,
    poly: Poly<Rational>,
}

impl PowerSeries {
    pub fn new(poly: Poly<Rational>, order: u32) -> Self {
        PowerSeries { poly: poly.truncate(order), order }
    }

    pub fn one(nvars: usize, order: u32) -> Self {
        Self::new(Poly::one(nvars), order)
    }

    /// Univariate series from coefficients `c_0, c_1, …`.
    pub fn univariate(coeffs: &[Rational], order: u32) -> Self {
        let p = Poly::from_terms(
            1,
            coeffs.iter().enumerate().map(|(i, c)| (vec![i as u32], c.clone())),
        );
        Self::new(p, order)
    }

    pub fn nvars(&self) -> usize {
        self.poly.nvars()
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn poly(&self) -> &Poly<Rational> {
        &self.poly
    }

    pub fn coeff(&self, exp: &[u32]) -> Rational {
        self.poly.coeff(exp)
    }

    pub fn constant_term(&self) -> Rational {
        self.poly.coeff(&vec![0; self.nvars()])
    }

    /// Homogeneous part of degree `n` as a polynomial.
    pub fn degree_part(&self, n: u32) -> Poly<Rational> {
        self.poly.homogeneous_part(n)
    }

    pub fn truncate(&self, order: u32) -> Self {
        Self::new(self.poly.clone(), order.min(self.order))
    }

    pub fn add(&self, other: &Self) -> Self {
        let order = self.order.min(other.order);
        Self::new(&self.poly + &other.poly, order)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let order = self.order.min(other.order);
        Self::new(&self.poly - &other.poly, order)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.poly.scale(c), self.order)
    }

    pub fn multiply(&self, other: &Self) -> Self {
        let order = self.order.min(other.order);
        let a = self.poly.truncate(order);
        let b = other.poly.truncate(order);
        Self::new(&a * &b, order)
    }

    /// `1/s`, for any nonzero constant term.
    pub fn reciprocal(&self) -> Result<Self, SeriesError> {
        let c0 = self.constant_term();
        if c0.is_zero() {
            return Err(SeriesError::ZeroConstantTerm);
        }
        // s = c0 (1 − u), 1/s = (1/c0) Σ u^j
        let inv = c0.recip();
        let nv = self.nvars();
        let u = Self::one(nv, self.order).sub(&self.scale(&inv));
        let mut acc = Self::one(nv, self.order);
        let mut term = Self::one(nv, self.order);
        for _ in 0..self.order {
            term = term.multiply(&u);
            if term.poly.is_zero() {
                break;
            }
            acc = acc.add(&term);
        }
        Ok(acc.scale(&inv))
    }

    /// Square root with constant term 1, by Newton iteration `y ← (y + s/y)/2`.
    pub fn square_root(&self) -> Result<Self, SeriesError> {
        if !self.constant_term().is_one() {
            return Err(SeriesError::ConstantTermNotOne);
        }
        let half = Rational::new(BigInt::one(), BigInt::from(2));
        let mut y = Self::one(self.nvars(), self.order);
        // each step doubles the number of correct degrees
        let steps = 2 + (32 - self.order.max(1).leading_zeros());
        for _ in 0..steps {
            let next = y.add(&self.multiply(&y.reciprocal()?)).scale(&half);
            if next == y {
                break;
            }
            y = next;
        }
        Ok(y)
    }

    /// Substitute a linear form `t = Σ c_i X_i` into a univariate series.
    pub fn compose_linear(&self, form: &[Rational]) -> Self {
        assert_eq!(self.nvars(), 1, "compose_linear takes a univariate series");
        let nv = form.len();
        let lin = Poly::from_terms(
            nv,
            form.iter().enumerate().map(|(i, c)| {
                let mut e = vec![0; nv];
                e[i] = 1;
                (e, c.clone())
            }),
        );
        let mut out = Poly::zero(nv);
        let mut power = Poly::one(nv);
        for n in 0..=self.order {
            let c = self.poly.coeff(&[n]);
            if !c.is_zero() {
                out = &out + &power.scale(&c);
            }
            power = (&power * &lin).truncate(self.order);
        }
        Self::new(out, self.order)
    }
}

impl fmt::Display for PowerSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in self.poly.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}")?;
            for (i, k) in e.iter().enumerate() {
                if *k > 0 {
                    write!(f, "·X{i}^{k}")?;
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(deg {})", self.order + 1)
    }
}

/// Named analytic germs at the origin.
#[derive(Clone, Debug, PartialEq)]
pub enum Germ {
    /// The constant 1 in `nvars` variables.
    One { nvars: usize },
    /// `Π_i (⟨w_i,X⟩/2) / sin(⟨w_i,X⟩/2)` over a list of weights (linear forms).
    XOverSin { weights: Vec<Vec<i64>> },
    /// `sin t / t`, the square root of the SU(2) Duflo function along `t ↦ tH`.
    JHalfSu2,
    /// The Duflo factor of an abelian Lie algebra, identically 1.
    JHalfTorus { rank: usize },
    /// `sin t / t`, the `g/h` factor for SU(2) ⊃ T.
    JHalfQuotientSu2T,
}

impl Germ {
    pub fn nvars(&self) -> usize {
        match self {
            Germ::One { nvars } => *nvars,
            Germ::XOverSin { weights } => weights.first().map_or(1, Vec::len),
            Germ::JHalfSu2 | Germ::JHalfQuotientSu2T => 1,
            Germ::JHalfTorus { rank } => *rank,
        }
    }
}

impl FromStr for Germ {
    type Err = SeriesError;

    /// Accepts `one`, `jhalf_su2`, `jhalf_torus`, `jhalf_quotient_su2_t`,
    /// `x_over_sin(2)` and `x_over_sin((2,0),(0,2))`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let unknown = || SeriesError::UnknownGerm(s.to_string());
        match s {
            "one" => return Ok(Germ::One { nvars: 1 }),
            "jhalf_su2" => return Ok(Germ::JHalfSu2),
            "jhalf_torus" => return Ok(Germ::JHalfTorus { rank: 1 }),
            "jhalf_quotient_su2_t" => return Ok(Germ::JHalfQuotientSu2T),
            _ => {}
        }
        let inner = s
            .strip_prefix("x_over_sin(")
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(unknown)?;
        let inner = inner.trim();
        let weights: Vec<Vec<i64>> = if inner.starts_with('(') {
            inner
                .split(')')
                .map(|chunk| chunk.trim_start_matches([',', ' ', '(']))
                .filter(|chunk| !chunk.is_empty())
                .map(|chunk| {
                    chunk
                        .split(',')
                        .map(|x| x.trim().parse::<i64>().map_err(|_| unknown()))
                        .collect::<Result<Vec<_>, _>>()
                })
                .collect::<Result<_, _>>()?
        } else {
            vec![vec![inner.parse::<i64>().map_err(|_| unknown())?]]
        };
        if weights.is_empty() || weights.iter().any(|w| w.len() != weights[0].len()) {
            return Err(unknown());
        }
        Ok(Germ::XOverSin { weights })
    }
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// Series of `sin t / t` up to degree `order`.
pub fn sinc_series(order: u32) -> PowerSeries {
    let coeffs: Vec<Rational> = (0..=order)
        .map(|n| {
            if n % 2 == 1 {
                Rational::zero()
            } else {
                let sign = if (n / 2) % 2 == 0 { BigInt::one() } else { -BigInt::one() };
                Rational::new(sign, factorial(n + 1))
            }
        })
        .collect();
    PowerSeries::univariate(&coeffs, order)
}

/// Truncated Taylor series of a catalog germ at the origin.
pub fn germ_taylor(germ: &Germ, order: u32) -> Result<PowerSeries, SeriesError> {
    if order > MAX_ORDER {
        return Err(SeriesError::OrderTooLarge(order));
    }
    match germ {
        Germ::One { nvars } => Ok(PowerSeries::one(*nvars, order)),
        Germ::JHalfTorus { rank } => Ok(PowerSeries::one(*rank, order)),
        Germ::JHalfSu2 | Germ::JHalfQuotientSu2T => Ok(sinc_series(order)),
        Germ::XOverSin { weights } => {
            let nv = germ.nvars();
            let inv_sinc = sinc_series(order).reciprocal()?;
            let half = Rational::new(BigInt::one(), BigInt::from(2));
            let mut acc = PowerSeries::one(nv, order);
            for w in weights {
                if w.iter().all(|x| *x == 0) {
                    return Err(SeriesError::UnknownGerm("x_over_sin with zero weight".into()));
                }
                let form: Vec<Rational> =
                    w.iter().map(|&x| Rational::from_integer(BigInt::from(x)) * &half).collect();
                acc = acc.multiply(&inv_sinc.compose_linear(&form));
            }
            Ok(acc)
        }
    }
}

/// Whether every monomial of odd total degree vanishes.
pub fn is_even(s: &PowerSeries) -> bool {
    s.poly().terms().all(|(e, c)| e.iter().sum::<u32>() % 2 == 0 || c.is_zero())
}

#[cfg(test)]
mod tests {
    use super::super::bernoulli::bernoulli_number;
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn uni(s: &PowerSeries, n: u32) -> Rational {
        s.coeff(&[n])
    }

    #[test]
    fn catalog_examples() {
        let one = germ_taylor(&"one".parse().unwrap(), 4).unwrap();
        assert_eq!(one, PowerSeries::one(1, 4));

        let xs = germ_taylor(&"x_over_sin(2)".parse().unwrap(), 4).unwrap();
        assert_eq!(uni(&xs, 0), r(1, 1));
        assert_eq!(uni(&xs, 1), r(0, 1));
        assert_eq!(uni(&xs, 2), r(1, 6));
        assert_eq!(uni(&xs, 4), r(7, 360));

        let j = germ_taylor(&Germ::JHalfSu2, 4).unwrap();
        assert_eq!(uni(&j, 2), r(-1, 6));
        assert_eq!(uni(&j, 4), r(1, 120));
    }

    #[test]
    fn x_over_sin_matches_bernoulli_closed_form() {
        // x/sin x = Σ (−1)^{n+1} (2^{2n} − 2) B_{2n} x^{2n} / (2n)!
        let xs = germ_taylor(&"x_over_sin(2)".parse().unwrap(), 24).unwrap();
        for n in 0..=12u32 {
            let sign = if n % 2 == 1 { 1 } else { -1 };
            let two_pow = BigInt::from(2).pow(2 * n) - BigInt::from(2);
            let expect = Rational::from_integer(BigInt::from(sign) * two_pow) * bernoulli_number(2 * n)
                / Rational::from_integer(factorial(2 * n));
            assert_eq!(uni(&xs, 2 * n), expect, "degree {}", 2 * n);
            assert!(uni(&xs, 2 * n + 1).is_zero() || 2 * n + 1 > 24);
        }
    }

    #[test]
    fn reciprocal_and_product_inverse() {
        for w in [2i64, 4, 6] {
            for order in [0u32, 3, 8, 17] {
                let germ = Germ::XOverSin { weights: vec![vec![w]] };
                let g = germ_taylor(&germ, order).unwrap();
                let half_w = r(w, 2);
                let sinc = sinc_series(order).compose_linear(&[half_w]);
                assert_eq!(g.multiply(&sinc), PowerSeries::one(1, order));
            }
        }
        let sinc = sinc_series(4);
        assert_eq!(
            sinc.reciprocal().unwrap(),
            germ_taylor(&"x_over_sin(2)".parse().unwrap(), 4).unwrap()
        );
    }

    #[test]
    fn square_root_of_sinc_squared() {
        for order in [4u32, 9, 16] {
            let s = sinc_series(order);
            let sq = s.multiply(&s);
            assert_eq!(sq.square_root().unwrap(), germ_taylor(&Germ::JHalfSu2, order).unwrap());
        }
    }

    #[test]
    fn multiply_examples() {
        let a = PowerSeries::univariate(&[r(1, 1), r(1, 1)], 4);
        let b = PowerSeries::univariate(&[r(1, 1), r(-1, 1)], 4);
        assert_eq!(a.multiply(&b), PowerSeries::univariate(&[r(1, 1), r(0, 1), r(-1, 1)], 4));
        // truncation goes to the smaller order
        assert_eq!(a.multiply(&b.truncate(1)).order(), 1);
    }

    #[test]
    fn errors() {
        let z = PowerSeries::univariate(&[r(0, 1), r(1, 1)], 3);
        assert_eq!(z.reciprocal(), Err(SeriesError::ZeroConstantTerm));
        let two = PowerSeries::univariate(&[r(2, 1)], 3);
        assert_eq!(two.square_root(), Err(SeriesError::ConstantTermNotOne));
        assert!(matches!("sinh".parse::<Germ>(), Err(SeriesError::UnknownGerm(_))));
        assert!(matches!(germ_taylor(&Germ::JHalfSu2, 65), Err(SeriesError::OrderTooLarge(65))));
    }

    #[test]
    fn two_weight_germ_is_product() {
        let g: Germ = "x_over_sin((2,0),(0,2))".parse().unwrap();
        let s = germ_taylor(&g, 6).unwrap();
        assert_eq!(s.nvars(), 2);
        assert_eq!(s.coeff(&[2, 0]), r(1, 6));
        assert_eq!(s.coeff(&[2, 2]), r(1, 36));
        assert_eq!(s.coeff(&[4, 2]), r(7, 360 * 6));
        assert!(is_even(&s));
    }
}
