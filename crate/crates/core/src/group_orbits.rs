//! Tori and SU(2): characters, Clebsch–Gordan, branching to the maximal
//! torus, Kirillov orbit measures, the map `R_g`, and the measures `B_{g/h}`.
//!
//! SU(2) conventions: `t = ℝH`, `⟨α, H⟩ = 2`, `⟨ρ, H⟩ = 1`, and labels are in
//! `ρ`-units, so `V_λ` has dimension `λ ≥ 1` and weights `λ−1, λ−3, …, 1−λ`.
//! `su(2)* ≅ ℝ³` with `t*` the last axis.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dist_calc::{DistError, Distribution};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GroupError {
    #[error("label {0} is not admissible for this group")]
    NotAdmissible(String),
    #[error("label does not belong to this group")]
    KindMismatch,
    #[error("unsupported subgroup pair: {0}")]
    UnsupportedPair(String),
    #[error(transparent)]
    Dist(#[from] DistError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GroupData {
    Torus { rank: usize },
    Su2,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum IrrepLabel {
    Torus(Vec<i64>),
    Su2(i64),
}

/// Pairs `G ⊃ H` with an implemented `B_{g/h}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SubgroupPair {
    /// SU(2) and its maximal torus.
    Su2Torus,
    /// `T^rank ⊃ T^sub`.
    TorusSubtorus { rank: usize, sub: usize },
}

impl GroupData {
    /// Dimension of `t`.
    pub fn rank(&self) -> usize {
        match self {
            GroupData::Torus { rank } => *rank,
            GroupData::Su2 => 1,
        }
    }

    /// `dim(G/T)/2`.
    pub fn half_root_count(&self) -> usize {
        match self {
            GroupData::Torus { .. } => 0,
            GroupData::Su2 => 1,
        }
    }

    /// Dimension of `g*`.
    pub fn coadjoint_dim(&self) -> usize {
        match self {
            GroupData::Torus { rank } => *rank,
            GroupData::Su2 => 3,
        }
    }

    pub fn is_admissible(&self, lam: &IrrepLabel) -> bool {
        match (self, lam) {
            (GroupData::Torus { rank }, IrrepLabel::Torus(mu)) => mu.len() == *rank,
            (GroupData::Su2, IrrepLabel::Su2(l)) => *l >= 1,
            _ => false,
        }
    }

    fn check(&self, lam: &IrrepLabel) -> Result<(), GroupError> {
        match (self, lam) {
            (GroupData::Torus { .. }, IrrepLabel::Su2(_)) | (GroupData::Su2, IrrepLabel::Torus(_)) => {
                Err(GroupError::KindMismatch)
            }
            _ if !self.is_admissible(lam) => Err(GroupError::NotAdmissible(format!("{lam:?}"))),
            _ => Ok(()),
        }
    }
}

/// Weights of `V_λ`: `λ−1, λ−3, …, 1−λ`.
pub fn branching_table(lam: i64) -> Vec<i64> {
    (0..lam.max(0)).map(|j| lam - 1 - 2 * j).collect()
}

/// Multiplicity of the `T`-weight `μ` in `V_λ`.
pub fn branching_c(lam: i64, mu: i64) -> u32 {
    u32::from(lam >= 1 && mu.abs() < lam && (mu - lam + 1).rem_euclid(2) == 0)
}

pub fn dimension(lam: &IrrepLabel) -> u64 {
    match lam {
        IrrepLabel::Torus(_) => 1,
        IrrepLabel::Su2(l) => (*l).max(0) as u64,
    }
}

/// `χ_λ(e^X)`; for SU(2) `X = tH` and the value is `sin(λt)/sin(t)`, summed
/// over weights so that it is regular everywhere.
pub fn character(g: &GroupData, lam: &IrrepLabel, x: &[f64]) -> Result<Complex64, GroupError> {
    g.check(lam)?;
    match lam {
        IrrepLabel::Torus(mu) => {
            let phase: f64 = mu.iter().zip(x).map(|(m, t)| *m as f64 * t).sum();
            Ok(Complex64::new(0.0, phase).exp())
        }
        IrrepLabel::Su2(l) => {
            let t = x[0];
            Ok(Complex64::new(branching_table(*l).iter().map(|&m| (m as f64 * t).cos()).sum(), 0.0))
        }
    }
}

/// `sin(t)/t`, the Duflo factor of SU(2) along `t`.
pub fn sinc(t: f64) -> f64 {
    if t.abs() < 1e-4 {
        let t2 = t * t;
        1.0 - t2 / 6.0 + t2 * t2 / 120.0
    } else {
        t.sin() / t
    }
}

/// Liouville measure `β_λ`: `δ_μ` for a torus, the sphere of radius `λ` and
/// mass `λ` for SU(2).
pub fn orbit_measure(g: &GroupData, lam: &IrrepLabel) -> Result<Distribution, GroupError> {
    g.check(lam)?;
    Ok(match lam {
        IrrepLabel::Torus(mu) => Distribution::delta(mu.iter().map(|&m| m as f64).collect()),
        IrrepLabel::Su2(l) => Distribution::sphere(*l as f64, *l as f64),
    })
}

/// `V_{λ1} ⊗ V_{λ2} = ⊕ V_j`, `j = |λ1−λ2|+1, |λ1−λ2|+3, …, λ1+λ2−1`.
pub fn clebsch_gordan(l1: i64, l2: i64) -> Result<Vec<i64>, GroupError> {
    for l in [l1, l2] {
        if l < 1 {
            return Err(GroupError::NotAdmissible(l.to_string()));
        }
    }
    Ok(((l1 - l2).abs() + 1..=l1 + l2 - 1).step_by(2).collect())
}

/// `R_g(β_λ) = δ_λ − δ_{−λ}` on `t*`.
pub fn rg_map(g: &GroupData, lam: &IrrepLabel) -> Result<Distribution, GroupError> {
    g.check(lam)?;
    match lam {
        IrrepLabel::Su2(l) => {
            let l = *l as f64;
            Ok(Distribution::delta(vec![l]).add(&Distribution::delta(vec![-l]).scale(Complex64::new(-1.0, 0.0))))
        }
        IrrepLabel::Torus(_) => Err(GroupError::UnsupportedPair("R_g is the identity on tori".into())),
    }
}

/// `B_{g/h}`: the measure on `h*` whose Fourier transform is `j^{1/2}_{g/h}`.
pub fn b_measure(pair: &SubgroupPair) -> Result<Distribution, GroupError> {
    match pair {
        SubgroupPair::Su2Torus => Ok(Distribution::interval(-1.0, 1.0, 0.5)),
        SubgroupPair::TorusSubtorus { rank, sub } if sub <= rank => Ok(Distribution::delta(vec![0.0; *sub])),
        SubgroupPair::TorusSubtorus { rank, sub } => {
            Err(GroupError::UnsupportedPair(format!("T^{sub} is not a subtorus of T^{rank}")))
        }
    }
}

/// Max over the grid of `|χ_λ(e^{tH})·sin(t)/t − ⟨β_λ, e^{i⟨·,tH⟩}⟩|`.
pub fn kirillov_residual(lam: i64, t_grid: &[f64]) -> Result<f64, GroupError> {
    let g = GroupData::Su2;
    let label = IrrepLabel::Su2(lam);
    let beta = orbit_measure(&g, &label)?;
    let mut worst: f64 = 0.0;
    for &t in t_grid {
        let lhs = character(&g, &label, &[t])? * sinc(t);
        let rhs = beta.fourier_pair(&[0.0, 0.0, t])?;
        worst = worst.max((lhs - rhs).norm());
    }
    Ok(worst)
}

/// `n` equally spaced points on `[lo, hi]`.
pub fn uniform_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn characters() {
        let g = GroupData::Su2;
        assert!((character(&g, &IrrepLabel::Su2(1), &[0.7]).unwrap().re - 1.0).abs() < 1e-15);
        assert!(character(&g, &IrrepLabel::Su2(2), &[PI / 2.0]).unwrap().norm() < 1e-15);
        assert!((character(&g, &IrrepLabel::Su2(5), &[0.0]).unwrap().re - 5.0).abs() < 1e-15);
        let t: f64 = 0.3;
        let want = (5.0 * t).sin() / t.sin();
        assert!((character(&g, &IrrepLabel::Su2(5), &[t]).unwrap().re - want).abs() < 1e-13);
        let tor = GroupData::Torus { rank: 1 };
        let v = character(&tor, &IrrepLabel::Torus(vec![3]), &[t]).unwrap();
        assert!((v - Complex64::new(0.0, 3.0 * t).exp()).norm() < 1e-15);
        assert!(matches!(character(&g, &IrrepLabel::Su2(0), &[0.0]), Err(GroupError::NotAdmissible(_))));
        assert!(matches!(character(&tor, &IrrepLabel::Su2(1), &[0.0]), Err(GroupError::KindMismatch)));
    }

    #[test]
    fn clebsch_gordan_examples() {
        assert_eq!(clebsch_gordan(2, 2).unwrap(), vec![1, 3]);
        assert_eq!(clebsch_gordan(7, 1).unwrap(), vec![7]);
        for k in 1..20 {
            let odd: Vec<i64> = (1..2 * k).step_by(2).collect();
            assert_eq!(clebsch_gordan(k, k).unwrap(), odd);
        }
    }

    #[test]
    fn clebsch_gordan_conserves_dimension() {
        for a in 1..=30 {
            for b in 1..=30 {
                assert_eq!(clebsch_gordan(a, b).unwrap().iter().sum::<i64>(), a * b);
            }
        }
    }

    #[test]
    fn branching() {
        assert_eq!(branching_c(3, 0), 1);
        assert_eq!(branching_c(3, 1), 0);
        assert_eq!(branching_c(1, 0), 1);
        for l in 1..=100 {
            let total: u32 = (-l..=l).map(|m| branching_c(l, m)).sum();
            assert_eq!(total as i64, l);
            let w = branching_table(l);
            assert_eq!(w.len() as i64, l);
            assert!(w.iter().all(|m| w.contains(&-m)));
        }
    }

    #[test]
    fn orbit_measures() {
        let g = GroupData::Su2;
        let b1 = orbit_measure(&g, &IrrepLabel::Su2(1)).unwrap();
        let t = 0.9;
        assert!((b1.fourier_pair(&[0.0, 0.0, t]).unwrap().re - sinc(t)).abs() < 1e-13);
        let b3 = orbit_measure(&g, &IrrepLabel::Su2(3)).unwrap();
        assert!((b3.fourier_pair(&[0.0, 0.0, 0.0]).unwrap().re - 3.0).abs() < 1e-13);
        let tor = orbit_measure(&GroupData::Torus { rank: 1 }, &IrrepLabel::Torus(vec![5])).unwrap();
        assert_eq!(tor, Distribution::delta(vec![5.0]));
    }

    #[test]
    fn rg_map_consistency() {
        let g = GroupData::Su2;
        for l in [1, 4] {
            let r = rg_map(&g, &IrrepLabel::Su2(l)).unwrap();
            let beta = orbit_measure(&g, &IrrepLabel::Su2(l)).unwrap();
            for t in [0.3, -1.1, 2.0] {
                let t: f64 = t;
                let lhs = r.fourier_pair(&[t]).unwrap();
                assert!((lhs - Complex64::new(0.0, 2.0 * (l as f64 * t).sin())).norm() < 1e-14);
                let rhs = Complex64::new(0.0, 2.0 * t) * beta.fourier_pair(&[0.0, 0.0, t]).unwrap();
                assert!((lhs - rhs).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn b_measures() {
        let b = b_measure(&SubgroupPair::Su2Torus).unwrap();
        assert!((b.fourier_pair(&[0.0]).unwrap().re - 1.0).abs() < 1e-15);
        assert!((b.fourier_pair(&[0.4]).unwrap().re - sinc(0.4)).abs() < 1e-15);
        let t = b_measure(&SubgroupPair::TorusSubtorus { rank: 2, sub: 1 }).unwrap();
        assert_eq!(t, Distribution::delta(vec![0.0]));
    }

    #[test]
    fn kirillov_examples() {
        assert!(kirillov_residual(1, &[0.5]).unwrap() <= 1e-10);
        assert!(kirillov_residual(2, &[PI]).unwrap() <= 1e-12);
        assert!(kirillov_residual(6, &[0.0]).unwrap() <= 1e-12);
    }

    #[test]
    fn pushforward_of_orbit_is_even_with_mass_lambda() {
        for l in 1..=6 {
            let beta = orbit_measure(&GroupData::Su2, &IrrepLabel::Su2(l)).unwrap();
            let p = beta.pushforward(&[vec![0.0, 0.0, 1.0]]).unwrap();
            assert!((p.fourier_pair(&[0.0]).unwrap().re - l as f64).abs() < 1e-10);
            let a = p.fourier_pair(&[0.7]).unwrap();
            let b = p.fourier_pair(&[-0.7]).unwrap();
            assert!((a - b).norm() < 1e-10 && a.im.abs() < 1e-10);
        }
    }
}
