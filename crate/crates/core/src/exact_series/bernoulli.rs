use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::Rational;

const CACHED: usize = 65;

/// Binomial coefficient `C(n, j)` as a big integer.
pub fn binomial(n: u32, j: u32) -> BigInt {
    if j > n {
        return BigInt::zero();
    }
    let j = j.min(n - j);
    let mut acc = BigInt::one();
    for i in 0..j {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

fn bernoulli_table(upto: usize) -> Vec<Rational> {
    // Σ_{j=0}^{n} C(n+1, j) B_j = 0 for n ≥ 1, B_0 = 1.
    let mut b: Vec<Rational> = Vec::with_capacity(upto + 1);
    b.push(Rational::one());
    for n in 1..=upto {
        let mut s = Rational::zero();
        for (j, bj) in b.iter().enumerate() {
            if !bj.is_zero() {
                s += Rational::from_integer(binomial(n as u32 + 1, j as u32)) * bj;
            }
        }
        b.push(-s / Rational::from_integer(BigInt::from(n + 1)));
    }
    b
}

fn cached() -> &'static [Rational] {
    static TABLE: OnceLock<Vec<Rational>> = OnceLock::new();
    TABLE.get_or_init(|| bernoulli_table(CACHED - 1))
}

/// `B_n` for the generating function `t/(eᵗ − 1)`, so `B_1 = −1/2`.
pub fn bernoulli_number(n: u32) -> Rational {
    let n = n as usize;
    if n < CACHED {
        cached()[n].clone()
    } else {
        bernoulli_table(n)[n].clone()
    }
}

/// `B_n(x) = Σ_j C(n, j) B_j x^{n−j}`.
pub fn bernoulli_polynomial(n: u32, x: &Rational) -> Rational {
    let mut acc = Rational::zero();
    let mut xp = Rational::one();
    // accumulate from j = n down to 0 so x^{n-j} grows with the loop
    for j in (0..=n).rev() {
        let bj = bernoulli_number(j);
        if !bj.is_zero() {
            acc += Rational::from_integer(binomial(n, j)) * bj * &xp;
        }
        xp *= x;
    }
    acc
}
