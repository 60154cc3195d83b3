//! Small dense linear algebra over exact rationals.

use num_traits::{One, Zero};

use crate::exact_series::Rational;

/// Row-reduce in place; returns pivot columns.
fn row_reduce(m: &mut [Vec<Rational>]) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                let pivot_row = m[r].clone();
                for (x, p) in m[i].iter_mut().zip(&pivot_row) {
                    *x -= &f * p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &[Vec<Rational>]) -> usize {
    let mut a = m.to_vec();
    row_reduce(&mut a).len()
}

/// Unique solution of a square system, if nonsingular.
pub fn solve(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let n = a.len();
    let mut aug: Vec<Vec<Rational>> =
        a.iter().zip(b).map(|(row, bi)| row.iter().cloned().chain([bi.clone()]).collect()).collect();
    let piv = row_reduce(&mut aug);
    if piv.len() != n || piv.iter().any(|&c| c >= n) {
        return None;
    }
    Some(aug.into_iter().map(|row| row[n].clone()).collect())
}

/// A basis of the null space.
pub fn null_space(a: &[Vec<Rational>], ncols: usize) -> Vec<Vec<Rational>> {
    if a.is_empty() {
        return (0..ncols)
            .map(|i| (0..ncols).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect())
            .collect();
    }
    let mut m = a.to_vec();
    let piv = row_reduce(&mut m);
    let free: Vec<usize> = (0..ncols).filter(|c| !piv.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); ncols];
            v[f] = Rational::one();
            for (row, &pc) in piv.iter().enumerate() {
                v[pc] = -m[row][f].clone();
            }
            v
        })
        .collect()
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_series::rat;

    #[test]
    fn solve_and_null_space() {
        let a = vec![vec![rat(1, 1), rat(2, 1)], vec![rat(3, 1), rat(4, 1)]];
        let x = solve(&a, &[rat(5, 1), rat(6, 1)]).unwrap();
        assert_eq!(x, vec![rat(-4, 1), rat(9, 2)]);
        let s = vec![vec![rat(1, 1), rat(2, 1)], vec![rat(2, 1), rat(4, 1)]];
        assert!(solve(&s, &[rat(1, 1), rat(1, 1)]).is_none());
        assert_eq!(rank(&s), 1);
        let ns = null_space(&s, 2);
        assert_eq!(ns.len(), 1);
        assert!(dot(&s[0], &ns[0]).is_zero());
    }
}
