use std::collections::BTreeMap;

use num_traits::Zero;

use super::{Polyhedron, QpError};
use crate::exact_series::Rational;
use crate::par::{self, Exec};
use crate::poly::Poly;

/// Polynomial in `(λ_1, …, λ_r, k)` on each residue class of `(λ, k)` mod `period`.
///
/// Residue classes that are absent from the table evaluate to zero.
#[derive(Clone, Debug, PartialEq)]
pub struct QuasiPolynomial {
    rank: usize,
    period: i64,
    table: BTreeMap<Vec<i64>, Poly<Rational>>,
}

impl QuasiPolynomial {
    pub fn new(rank: usize, period: i64) -> Result<Self, QpError> {
        if period < 1 {
            return Err(QpError::BadPeriod(period));
        }
        Ok(QuasiPolynomial { rank, period, table: BTreeMap::new() })
    }

    /// The polynomial `p` on every residue class.
    pub fn polynomial(rank: usize, p: Poly<Rational>) -> Self {
        let mut q = QuasiPolynomial { rank, period: 1, table: BTreeMap::new() };
        q.set(vec![0; rank + 1], p).expect("period 1 accepts the zero class");
        q
    }

    pub fn constant(rank: usize, c: Rational) -> Self {
        Self::polynomial(rank, Poly::constant(rank + 1, c))
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn period(&self) -> i64 {
        self.period
    }

    /// Upper bound on the total degree over all classes.
    pub fn degree(&self) -> u32 {
        self.table.values().filter_map(Poly::degree).max().unwrap_or(0)
    }

    pub fn classes(&self) -> impl Iterator<Item = (&Vec<i64>, &Poly<Rational>)> {
        self.table.iter()
    }

    /// Set the polynomial on residue class `residues = (λ mod D, k mod D)`.
    pub fn set(&mut self, residues: Vec<i64>, p: Poly<Rational>) -> Result<(), QpError> {
        if residues.len() != self.rank + 1 || p.nvars() != self.rank + 1 {
            return Err(QpError::RankMismatch { expected: self.rank + 1, got: residues.len() });
        }
        if residues.iter().any(|&r| r < 0 || r >= self.period) {
            return Err(QpError::BadResidue(residues));
        }
        if p.is_zero() {
            self.table.remove(&residues);
        } else {
            self.table.insert(residues, p);
        }
        Ok(())
    }

    pub fn eval(&self, lambda: &[i64], k: i64) -> Rational {
        let key: Vec<i64> =
            lambda.iter().chain(std::iter::once(&k)).map(|x| x.rem_euclid(self.period)).collect();
        match self.table.get(&key) {
            None => Rational::zero(),
            Some(p) => {
                let x: Vec<Rational> =
                    lambda.iter().chain(std::iter::once(&k)).map(|&v| Rational::from_integer(v.into())).collect();
                p.eval(&x)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Piece {
    pub polyhedron: Polyhedron,
    pub coeff: i64,
    pub qp: QuasiPolynomial,
}

/// `m(λ,k) = Σ_P α_P m_P(λ,k) [λ/k ∈ P]` over finitely many closed pieces.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseQP {
    rank: usize,
    pieces: Vec<Piece>,
}

/// Outcome of an exhaustive comparison on a window.
#[derive(Clone, Debug, PartialEq)]
pub struct WindowCheck {
    pub equal: bool,
    pub points_checked: usize,
    /// First `(λ, k, left, right)` with differing values, in `(k, λ)` order.
    pub counterexample: Option<(Vec<i64>, i64, Rational, Rational)>,
}

/// Two pieces whose quasi-polynomials disagree on a lattice point both contain.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryConflict {
    pub lambda: Vec<i64>,
    pub k: i64,
    pub pieces: (usize, usize),
}

impl PiecewiseQP {
    pub fn new(rank: usize, pieces: Vec<Piece>) -> Result<Self, QpError> {
        for p in &pieces {
            if p.polyhedron.rank() != rank || p.qp.rank() != rank {
                return Err(QpError::RankMismatch { expected: rank, got: p.polyhedron.rank() });
            }
        }
        Ok(PiecewiseQP { rank, pieces })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn eval(&self, lambda: &[i64], k: i64) -> Rational {
        assert!(k >= 1, "k must be positive");
        assert_eq!(lambda.len(), self.rank);
        let mut acc = Rational::zero();
        for p in &self.pieces {
            if p.coeff != 0 && p.polyhedron.contains_scaled(lambda, k) {
                acc += p.qp.eval(lambda, k) * Rational::from_integer(p.coeff.into());
            }
        }
        acc
    }

    /// A copy with `delta` added on the ray class of `(λ, k)`: every `(λ′, k′)`
    /// with `λ′/k′ = λ/k` and `(λ′, k′) ≡ (λ, k) mod period`. With `period`
    /// larger than every `k` of interest this is a single-point defect.
    pub fn with_point_defect(&self, lambda: &[i64], k: i64, delta: i64, period: i64) -> Result<Self, QpError> {
        let mut qp = QuasiPolynomial::new(self.rank, period)?;
        let key: Vec<i64> = lambda.iter().chain(std::iter::once(&k)).map(|x| x.rem_euclid(period)).collect();
        qp.set(key, Poly::constant(self.rank + 1, Rational::from_integer(delta.into())))?;
        let point: Vec<Rational> = lambda.iter().map(|&x| Rational::new(x.into(), k.into())).collect();
        let mut pieces = self.pieces.clone();
        pieces.push(Piece { polyhedron: Polyhedron::cube(&point, &point), coeff: 1, qp });
        Ok(PiecewiseQP { rank: self.rank, pieces })
    }

    /// Lattice points `(λ, k)` with `λ/k` in a bounded `window`, `1 ≤ k ≤ k_max`.
    pub fn window_points(window: &Polyhedron, k_max: i64) -> Result<Vec<(Vec<i64>, i64)>, QpError> {
        if window.is_unbounded() {
            return Err(QpError::UnboundedWindow);
        }
        let mut out = Vec::new();
        for k in 1..=k_max {
            let Some((lo, hi)) = window.scaled_integer_box(k) else {
                // empty window
                return Ok(out);
            };
            let mut cur = lo.clone();
            'outer: loop {
                if window.contains_scaled(&cur, k) {
                    out.push((cur.clone(), k));
                }
                for i in 0..cur.len() {
                    if cur[i] < hi[i] {
                        cur[i] += 1;
                        continue 'outer;
                    }
                    cur[i] = lo[i];
                }
                break;
            }
        }
        Ok(out)
    }

    /// The boundary-consistency condition: wherever two pieces both contain
    /// `λ/k`, their quasi-polynomials agree.
    pub fn boundary_conflicts(&self, window: &Polyhedron, k_max: i64) -> Result<Vec<BoundaryConflict>, QpError> {
        let mut out = Vec::new();
        for (lambda, k) in Self::window_points(window, k_max)? {
            let inside: Vec<usize> = (0..self.pieces.len())
                .filter(|&i| self.pieces[i].polyhedron.contains_scaled(&lambda, k))
                .collect();
            for (a, &i) in inside.iter().enumerate() {
                for &j in &inside[a + 1..] {
                    if self.pieces[i].qp.eval(&lambda, k) != self.pieces[j].qp.eval(&lambda, k) {
                        out.push(BoundaryConflict { lambda: lambda.clone(), k, pieces: (i, j) });
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Exhaustive comparison of two piecewise quasi-polynomials on all lattice
/// points with `λ/k` in `window`, `1 ≤ k ≤ k_max`.
pub fn pqp_diff_zero_on_window(
    m1: &PiecewiseQP,
    m2: &PiecewiseQP,
    window: &Polyhedron,
    k_max: i64,
) -> Result<WindowCheck, QpError> {
    pqp_diff_zero_on_window_with(Exec::default(), m1, m2, window, k_max)
}

pub fn pqp_diff_zero_on_window_with(
    exec: Exec,
    m1: &PiecewiseQP,
    m2: &PiecewiseQP,
    window: &Polyhedron,
    k_max: i64,
) -> Result<WindowCheck, QpError> {
    let points = PiecewiseQP::window_points(window, k_max)?;
    let diffs = par::map(exec, &points, |(l, k)| {
        let (a, b) = (m1.eval(l, *k), m2.eval(l, *k));
        (a != b).then_some((a, b))
    });
    let counterexample = points
        .iter()
        .zip(diffs)
        .find_map(|((l, k), d)| d.map(|(a, b)| (l.clone(), *k, a, b)));
    Ok(WindowCheck { equal: counterexample.is_none(), points_checked: points.len(), counterexample })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_series::rat;

    /// ½(1 − (−1)^λ) on λ/k ∈ [0, 2].
    fn flag_square() -> PiecewiseQP {
        let mut qp = QuasiPolynomial::new(1, 2).unwrap();
        for kres in 0..2 {
            qp.set(vec![1, kres], Poly::one(2)).unwrap();
        }
        let p = Polyhedron::interval(Some(rat(0, 1)), Some(rat(2, 1)));
        PiecewiseQP::new(1, vec![Piece { polyhedron: p, coeff: 1, qp }]).unwrap()
    }

    #[test]
    fn flag_square_values() {
        let m = flag_square();
        assert_eq!(m.eval(&[3], 2), rat(1, 1));
        assert_eq!(m.eval(&[4], 2), rat(0, 1));
        assert_eq!(m.eval(&[5], 2), rat(0, 1));
    }

    #[test]
    fn window_comparison() {
        let m = flag_square();
        let w = Polyhedron::interval(Some(rat(-4, 1)), Some(rat(4, 1)));
        let same = pqp_diff_zero_on_window(&m, &m, &w, 10).unwrap();
        assert!(same.equal);
        let bad = m.with_point_defect(&[1], 1, 1, 64).unwrap();
        let unit = Polyhedron::interval(Some(rat(0, 1)), Some(rat(1, 1)));
        let r = pqp_diff_zero_on_window(&m, &bad, &unit, 1).unwrap();
        assert!(!r.equal);
        assert_eq!(r.counterexample, Some((vec![1], 1, rat(1, 1), rat(2, 1))));
        // the defect is confined to k = 1
        assert_eq!(bad.eval(&[2], 2), m.eval(&[2], 2));
        assert_eq!(bad.eval(&[3], 3), m.eval(&[3], 3));
    }

    #[test]
    fn unbounded_window_rejected() {
        let m = flag_square();
        let w = Polyhedron::interval(Some(rat(0, 1)), None);
        assert!(matches!(pqp_diff_zero_on_window(&m, &m, &w, 3), Err(QpError::UnboundedWindow)));
    }

    #[test]
    fn boundary_conflicts_detected() {
        // two chambers [0,1] and [1,2] with values 1 and 2: they disagree at λ/k = 1
        let a = Piece {
            polyhedron: Polyhedron::interval(Some(rat(0, 1)), Some(rat(1, 1))),
            coeff: 1,
            qp: QuasiPolynomial::constant(1, rat(1, 1)),
        };
        let mut b = a.clone();
        b.polyhedron = Polyhedron::interval(Some(rat(1, 1)), Some(rat(2, 1)));
        b.qp = QuasiPolynomial::constant(1, rat(2, 1));
        let m = PiecewiseQP::new(1, vec![a, b]).unwrap();
        let w = Polyhedron::interval(Some(rat(0, 1)), Some(rat(2, 1)));
        let c = m.boundary_conflicts(&w, 3).unwrap();
        assert_eq!(c.len(), 3);
        assert!(c.iter().all(|x| x.lambda[0] == x.k));
    }
}
