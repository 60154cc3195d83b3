use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{crational_to_c64, i_pow, CRational, Rational, SeriesError};

/// `e^{2πi p/q}` with `0 ≤ p < q`, `gcd(p, q) = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct RootOfUnity {
    p: u64,
    q: u64,
}

impl RootOfUnity {
    pub fn new(p: i64, q: u64) -> Self {
        assert!(q > 0, "rotation denominator must be positive");
        let p = p.rem_euclid(q as i64) as u64;
        let g = p.gcd(&q).max(1);
        RootOfUnity { p: p / g, q: q / g }
    }

    pub fn one() -> Self {
        RootOfUnity { p: 0, q: 1 }
    }

    pub fn numer(&self) -> u64 {
        self.p
    }

    /// Order of the root.
    pub fn order(&self) -> u64 {
        self.q
    }

    pub fn is_one(&self) -> bool {
        self.q == 1
    }

    pub fn pow(&self, n: i64) -> Self {
        let e = (self.p as i128 * n as i128).rem_euclid(self.q as i128) as i64;
        RootOfUnity::new(e, self.q)
    }

    /// Exact value when the root lies in `{±1, ±i}`.
    pub fn exact(&self) -> Option<CRational> {
        match self.q {
            1 => Some(i_pow(0)),
            2 => Some(i_pow(2)),
            4 => Some(i_pow(self.p as u32)),
            _ => None,
        }
    }

    pub fn to_c64(&self) -> Complex64 {
        if let Some(e) = self.exact() {
            return crational_to_c64(&e);
        }
        Complex64::from_polar(1.0, 2.0 * PI * self.p as f64 / self.q as f64)
    }

    /// `ζ^n` as a float, reducing the exponent first.
    pub fn pow_c64(&self, n: i64) -> Complex64 {
        self.pow(n).to_c64()
    }
}

impl fmt::Display for RootOfUnity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

impl FromStr for RootOfUnity {
    type Err = String;
    /// Rotation number `p/q` (or an integer, meaning ζ = 1).
    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        let (p, q) = match s.split_once('/') {
            Some((p, q)) => (p.trim(), q.trim()),
            None => (s, "1"),
        };
        let p: i64 = p.parse().map_err(|_| format!("bad rotation numerator in {s:?}"))?;
        let q: u64 = q.parse().map_err(|_| format!("bad rotation denominator in {s:?}"))?;
        if q == 0 {
            return Err(format!("zero rotation denominator in {s:?}"));
        }
        Ok(RootOfUnity::new(p, q))
    }
}

impl TryFrom<String> for RootOfUnity {
    type Error = String;
    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

impl From<RootOfUnity> for String {
    fn from(z: RootOfUnity) -> String {
        z.to_string()
    }
}

/// A complex value that is exact when the inputs allow it.
#[derive(Clone, Debug, PartialEq)]
pub enum CValue {
    Exact(CRational),
    Approx(Complex64),
}

impl CValue {
    pub fn to_c64(&self) -> Complex64 {
        match self {
            CValue::Exact(c) => crational_to_c64(c),
            CValue::Approx(c) => *c,
        }
    }
}

/// Numerator `N_m` of `S_m(z) = N_m(z) / (1 − z)^{m+1}`, from
/// `N_{m+1} = z (N_m′ (1 − z) + (m + 1) N_m)`.
fn numerator_poly(m: u32) -> Vec<BigInt> {
    let mut n = vec![BigInt::one()];
    for j in 0..m {
        let deg = n.len();
        let mut next = vec![BigInt::zero(); deg + 1];
        for (e, c) in n.iter().enumerate() {
            // (m+1) N_m term, with j+1 in place of m+1
            next[e + 1] += BigInt::from(j + 1) * c;
            if e > 0 {
                // N_m' (1 − z) multiplied by z
                next[e] += BigInt::from(e) * c;
                next[e + 1] -= BigInt::from(e) * c;
            }
        }
        while next.len() > 1 && next.last().is_some_and(Zero::is_zero) {
            next.pop();
        }
        n = next;
    }
    n
}

/// `S_m` evaluated at an arbitrary complex point `z ≠ 1` (the rational function).
pub fn lerch_s_at(z: Complex64, m: u32) -> Complex64 {
    let num = numerator_poly(m);
    let mut acc = Complex64::zero();
    for c in num.iter().rev() {
        acc = acc * z + c.to_f64().unwrap_or(f64::NAN);
    }
    acc / (Complex64::one() - z).powu(m + 1)
}

/// Abel sum of `Σ_{j≥0} j^m ζ^j`, i.e. `(ζ d/dζ)^m (1 − ζ)^{−1}`.
pub fn lerch_s(zeta: RootOfUnity, m: u32) -> Result<CValue, SeriesError> {
    if zeta.is_one() {
        return Err(SeriesError::TrivialRoot);
    }
    match zeta.exact() {
        Some(z) => {
            let num = numerator_poly(m);
            let mut acc = CRational::zero();
            for c in num.iter().rev() {
                acc = acc * z.clone() + Complex::new(Rational::from_integer(c.clone()), Rational::zero());
            }
            let one_minus = CRational::one() - z;
            let mut den = CRational::one();
            for _ in 0..=m {
                den *= one_minus.clone();
            }
            Ok(CValue::Exact(acc / den))
        }
        None => Ok(CValue::Approx(lerch_s_at(zeta.to_c64(), m))),
    }
}
