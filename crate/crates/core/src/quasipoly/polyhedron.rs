use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::linalg::{dot, null_space, rank, solve};
use crate::exact_series::Rational;

/// `⟨normal, ξ⟩ ≥ offset`.
#[derive(Clone, Debug, PartialEq)]
pub struct HalfSpace {
    pub normal: Vec<Rational>,
    pub offset: Rational,
}

/// Closed rational polyhedron given by half-spaces. Empty polyhedra are allowed.
#[derive(Clone, Debug, PartialEq)]
pub struct Polyhedron {
    rank: usize,
    halfspaces: Vec<HalfSpace>,
}

impl Polyhedron {
    pub fn new(rank: usize, halfspaces: Vec<HalfSpace>) -> Self {
        assert!(halfspaces.iter().all(|h| h.normal.len() == rank), "normal length must equal rank");
        Polyhedron { rank, halfspaces }
    }

    /// All of `ℝ^rank`.
    pub fn whole(rank: usize) -> Self {
        Polyhedron { rank, halfspaces: Vec::new() }
    }

    /// `[lo, hi]` in rank 1; either end may be absent.
    pub fn interval(lo: Option<Rational>, hi: Option<Rational>) -> Self {
        let mut hs = Vec::new();
        if let Some(lo) = lo {
            hs.push(HalfSpace { normal: vec![Rational::from_integer(1.into())], offset: lo });
        }
        if let Some(hi) = hi {
            hs.push(HalfSpace { normal: vec![Rational::from_integer((-1).into())], offset: -hi });
        }
        Polyhedron { rank: 1, halfspaces: hs }
    }

    /// Axis-parallel box `Π [lo_i, hi_i]`.
    pub fn cube(lo: &[Rational], hi: &[Rational]) -> Self {
        let r = lo.len();
        let mut hs = Vec::new();
        for i in 0..r {
            let mut e = vec![Rational::zero(); r];
            e[i] = Rational::from_integer(1.into());
            hs.push(HalfSpace { normal: e.clone(), offset: lo[i].clone() });
            hs.push(HalfSpace { normal: e.iter().map(|x| -x).collect(), offset: -hi[i].clone() });
        }
        Polyhedron { rank: r, halfspaces: hs }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn halfspaces(&self) -> &[HalfSpace] {
        &self.halfspaces
    }

    pub fn with_halfspace(&self, h: HalfSpace) -> Self {
        let mut p = self.clone();
        p.halfspaces.push(h);
        p
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        self.halfspaces.iter().all(|h| dot(&h.normal, x) >= h.offset)
    }

    /// Exact test of `λ/k ∈ P` without forming the quotient.
    pub fn contains_scaled(&self, lambda: &[i64], k: i64) -> bool {
        debug_assert!(k > 0);
        let l: Vec<Rational> = lambda.iter().map(|&x| Rational::from_integer(x.into())).collect();
        let kr = Rational::from_integer(k.into());
        self.halfspaces.iter().all(|h| dot(&h.normal, &l) >= &h.offset * &kr)
    }

    /// Vertices, found by intersecting `rank` constraints at a time.
    pub fn vertices(&self) -> Vec<Vec<Rational>> {
        let r = self.rank;
        let mut out: Vec<Vec<Rational>> = Vec::new();
        for idx in (0..self.halfspaces.len()).combinations(r) {
            let a: Vec<Vec<Rational>> = idx.iter().map(|&i| self.halfspaces[i].normal.clone()).collect();
            let b: Vec<Rational> = idx.iter().map(|&i| self.halfspaces[i].offset.clone()).collect();
            if let Some(v) = solve(&a, &b) {
                if self.contains(&v) && !out.contains(&v) {
                    out.push(v);
                }
            }
        }
        out
    }

    /// Whether the polyhedron (assumed nonempty) has a nonzero recession direction.
    pub fn is_unbounded(&self) -> bool {
        let r = self.rank;
        let normals: Vec<Vec<Rational>> = self.halfspaces.iter().map(|h| h.normal.clone()).collect();
        if rank(&normals) < r {
            return true;
        }
        // a pointed nontrivial recession cone has an extreme ray cut out by r−1 constraints
        for idx in (0..normals.len()).combinations(r - 1) {
            let a: Vec<Vec<Rational>> = idx.iter().map(|&i| normals[i].clone()).collect();
            let ns = null_space(&a, r);
            if ns.len() != 1 {
                continue;
            }
            for sign in [1i64, -1] {
                let d: Vec<Rational> = ns[0].iter().map(|x| x * Rational::from_integer(sign.into())).collect();
                if normals.iter().all(|n| !dot(n, &d).is_negative()) {
                    return true;
                }
            }
        }
        false
    }

    /// Integer bounding box `[floor(min), ceil(max)]` of `k·P`, or `None` when
    /// `P` is empty or unbounded.
    pub fn scaled_integer_box(&self, k: i64) -> Option<(Vec<i64>, Vec<i64>)> {
        let verts = self.vertices();
        if verts.is_empty() || self.is_unbounded() {
            return None;
        }
        let kr = Rational::from_integer(k.into());
        let mut lo = vec![i64::MAX; self.rank];
        let mut hi = vec![i64::MIN; self.rank];
        for v in &verts {
            for i in 0..self.rank {
                let x = &v[i] * &kr;
                let f = to_i64(&x.floor());
                let c = to_i64(&x.ceil());
                lo[i] = lo[i].min(f);
                hi[i] = hi[i].max(c);
            }
        }
        Some((lo, hi))
    }
}

fn to_i64(x: &Rational) -> i64 {
    let (q, _) = x.numer().div_rem(x.denom());
    i64::try_from(&q as &BigInt).expect("coordinate fits in i64")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_series::rat;

    #[test]
    fn membership_and_box() {
        let p = Polyhedron::interval(Some(rat(0, 1)), Some(rat(2, 1)));
        assert!(p.contains_scaled(&[4], 2));
        assert!(!p.contains_scaled(&[5], 2));
        assert!(p.contains_scaled(&[0], 7));
        assert_eq!(p.scaled_integer_box(3), Some((vec![0], vec![6])));
        assert!(!p.is_unbounded());
        let half = Polyhedron::interval(Some(rat(0, 1)), None);
        assert!(half.is_unbounded());
        assert_eq!(half.scaled_integer_box(3), None);
    }

    #[test]
    fn triangle_vertices() {
        // x ≥ 0, y ≥ 0, x + y ≤ 1
        let p = Polyhedron::new(
            2,
            vec![
                HalfSpace { normal: vec![rat(1, 1), rat(0, 1)], offset: rat(0, 1) },
                HalfSpace { normal: vec![rat(0, 1), rat(1, 1)], offset: rat(0, 1) },
                HalfSpace { normal: vec![rat(-1, 1), rat(-1, 1)], offset: rat(-1, 1) },
            ],
        );
        assert_eq!(p.vertices().len(), 3);
        assert!(!p.is_unbounded());
        assert_eq!(p.scaled_integer_box(4), Some((vec![0, 0], vec![4, 4])));
        let cone = Polyhedron::new(2, p.halfspaces()[..2].to_vec());
        assert!(cone.is_unbounded());
    }
}
