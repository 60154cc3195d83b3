//! Restriction from SU(2) to its maximal torus: multiplicity transfer,
//! pushforward of orbit measures, the reduction-in-stages identity
//! `Σ m·dim V_λ = Σ m·vol(Gλ)`, and twisted descent checks.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::Serialize;

use crate::asymptotics::{fit_order, AsymError, OrderFitReport};
use crate::dist_calc::{Distribution, Integrand, LaurentDistSeries, TestFunction};
use crate::exact_series::RootOfUnity;
use crate::group_orbits::{b_measure, branching_c, branching_table, orbit_measure, GroupData, IrrepLabel, SubgroupPair};
use crate::models::{Model, ModelError, ModelKind};
use crate::par::{self, Exec};
use crate::quasipoly::PiecewiseQP;

/// Pushforward `su(2)* → t*` onto the last coordinate.
pub const TORUS_PROJECTION: [[f64; 3]; 1] = [[0.0, 0.0, 1.0]];

fn projection() -> Vec<Vec<f64>> {
    TORUS_PROJECTION.iter().map(|r| r.to_vec()).collect()
}

fn require_restriction(model: &Model) -> Result<(), ModelError> {
    if !model.has_restriction() {
        return Err(ModelError::Unsupported(format!("{} has no restriction data", model.name())));
    }
    Ok(())
}

/// `m′_T(μ,k) = Σ_λ m_G(λ,k)·c(λ,μ)`.
pub fn restricted_multiplicity(model: &Model, mu: i64, k: i64) -> Result<i64, ModelError> {
    require_restriction(model)?;
    Ok(model
        .compact_support(k)?
        .iter()
        .map(|(lam, m)| m * i64::from(branching_c(lam[0], mu)))
        .sum())
}

/// `m_T(μ,k)` computed on the torus side directly from the weights.
pub fn direct_h_multiplicity(model: &Model, mu: i64, k: i64) -> Result<i64, ModelError> {
    require_restriction(model)?;
    if k < 1 {
        return Err(ModelError::BadLevel(k));
    }
    match model.kind() {
        ModelKind::Su2Orbit => Ok(i64::from(branching_c(k, mu))),
        ModelKind::Su2FlagSquare => {
            let w = branching_table(k);
            Ok(w.iter().filter(|&&m1| w.contains(&(mu - m1))).count() as i64)
        }
        _ => Err(ModelError::Unsupported(format!("{} has no torus-side oracle", model.name()))),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RestrictionRow {
    pub mu: i64,
    pub k: i64,
    pub direct: i64,
    pub restricted: i64,
    pub equal: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RestrictionReport {
    pub model: String,
    pub subgroup: String,
    pub k_max: i64,
    pub mu_bound: i64,
    pub rows: Vec<RestrictionRow>,
    pub pass: bool,
    /// First failing row in `(k, μ)` order.
    pub counterexample: Option<RestrictionRow>,
}

impl RestrictionReport {
    /// Columns `k, mu, direct, restricted, equal`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,mu,direct,restricted,equal\n");
        for r in &self.rows {
            let _ = writeln!(out, "{},{},{},{},{}", r.k, r.mu, r.direct, r.restricted, r.equal);
        }
        out
    }
}

/// Exhaustive comparison of `m′_T` and `m_T` on `1 ≤ k ≤ k_max`, `|μ| ≤ mu_bound`.
pub fn verify_restriction(model: &Model, k_max: i64, mu_bound: i64) -> Result<RestrictionReport, ModelError> {
    verify_restriction_with(model, k_max, mu_bound, Exec::default())
}

pub fn verify_restriction_with(
    model: &Model,
    k_max: i64,
    mu_bound: i64,
    exec: Exec,
) -> Result<RestrictionReport, ModelError> {
    require_restriction(model)?;
    let per_k = par::map_range(exec, 1..k_max + 1, |k| -> Result<Vec<RestrictionRow>, ModelError> {
        (-mu_bound..=mu_bound)
            .map(|mu| {
                let direct = direct_h_multiplicity(model, mu, k)?;
                let restricted = restricted_multiplicity(model, mu, k)?;
                Ok(RestrictionRow { mu, k, direct, restricted, equal: direct == restricted })
            })
            .collect()
    });
    let mut rows = Vec::new();
    for chunk in per_k {
        rows.extend(chunk?);
    }
    let counterexample = rows.iter().find(|r| !r.equal).cloned();
    Ok(RestrictionReport {
        model: model.name(),
        subgroup: "T".into(),
        k_max,
        mu_bound,
        pass: counterexample.is_none(),
        rows,
        counterexample,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MysteryCheck {
    pub k: i64,
    /// `Σ_λ m(λ,k)·dim V_λ`.
    pub dim_total: i64,
    /// `Σ_λ m(λ,k)·vol(Gλ)` with `vol(Gλ) = ⟨β_λ, 1⟩`.
    pub vol_sum: i64,
    pub equal: bool,
}

/// Both sides of `Σ m·dim V_λ = Σ m·vol(Gλ)` for a compact model.
pub fn mystery_check(model: &Model, k: i64) -> Result<MysteryCheck, ModelError> {
    if !model.is_compact() {
        return Err(ModelError::Unsupported(format!("{} is not compact", model.name())));
    }
    let g = model.group();
    let mut dim_total = 0;
    let mut vol_sum = 0;
    for (lam, m) in model.compact_support(k)? {
        let label = IrrepLabel::Su2(lam[0]);
        dim_total += m * crate::group_orbits::dimension(&label) as i64;
        let vol = orbit_measure(&g, &label)?.fourier_pair(&[0.0; 3])?.re;
        let rounded = vol.round();
        if (vol - rounded).abs() > 1e-9 {
            return Err(ModelError::Unsupported(format!("orbit volume {vol} is not an integer")));
        }
        vol_sum += m * rounded as i64;
    }
    Ok(MysteryCheck { k, dim_total, vol_sum, equal: dim_total == vol_sum })
}

/// Max over the grid of `|F[r_*β_λ](t) − F[B](t)·Σ_μ c(λ,μ) e^{iμt}|`.
pub fn pushforward_orbit_check(lam: i64, t_grid: &[f64]) -> Result<f64, ModelError> {
    let beta = orbit_measure(&GroupData::Su2, &IrrepLabel::Su2(lam))?;
    let pushed = beta.pushforward(&projection())?;
    let b = b_measure(&SubgroupPair::Su2Torus)?;
    let mut worst: f64 = 0.0;
    for &t in t_grid {
        let lhs = pushed.fourier_pair(&[t])?;
        let weights: Complex64 = (-lam..=lam)
            .map(|mu| Complex64::new(0.0, mu as f64 * t).exp() * branching_c(lam, mu) as f64)
            .sum();
        let rhs = b.fourier_pair(&[t])? * weights;
        worst = worst.max((lhs - rhs).norm());
    }
    Ok(worst)
}

/// `Θ^T_k = Σ_μ m_T(μ,k) δ_{μ/k}` from the torus-side oracle.
pub fn torus_theta(model: &Model, k: i64) -> Result<Distribution, ModelError> {
    let mut out = Distribution::zero(1);
    for mu in -2 * k..=2 * k {
        let m = direct_h_multiplicity(model, mu, k)?;
        if m != 0 {
            out = out.add(&Distribution::delta(vec![mu as f64 / k as f64]).scale(Complex64::new(m as f64, 0.0)));
        }
    }
    Ok(out)
}

/// Max over `phis` of `|⟨r_*Θ^G_k, φ⟩ − ⟨rescale_k(B) ⋆ Θ^T_k, φ⟩|`.
pub fn finite_k_functoriality(model: &Model, k: i64, phis: &[TestFunction]) -> Result<f64, ModelError> {
    require_restriction(model)?;
    let lhs = model.theta_distribution(k)?.pushforward(&projection())?;
    let b = b_measure(&SubgroupPair::Su2Torus)?.rescale(k as f64);
    let rhs = b.convolve(&torus_theta(model, k)?)?;
    let mut worst: f64 = 0.0;
    for phi in phis {
        worst = worst.max((lhs.pair(phi)? - rhs.pair(phi)?).norm());
    }
    Ok(worst)
}

/// Decay check on `Σ_ν d(ν,k) ζ^ν φ(ν/k)`, optionally minus a reference
/// series kept through `θ_{N−1}`; passes when the residual decays at rate
/// at least `N − ½` or vanishes.
pub fn twisted_descent_check(
    d: &PiecewiseQP,
    zeta: RootOfUnity,
    phi: &TestFunction,
    ladder: &[i64],
    n: u32,
    reference: Option<&LaurentDistSeries>,
) -> Result<OrderFitReport, AsymError> {
    let model = Model::custom("d", d.clone(), 1)?;
    let sums = ladder
        .iter()
        .map(|&k| model.twisted_sum(zeta, k, phi).map(|v| v.value))
        .collect::<Result<Vec<_>, _>>()?;
    descent_report("twisted descent", ladder, n, sums, phi, reference)
}

/// [`twisted_descent_check`] with `d = m′_T − m_T` for a model with restriction data.
pub fn restriction_descent_check(
    model: &Model,
    zeta: RootOfUnity,
    phi: &TestFunction,
    ladder: &[i64],
    n: u32,
) -> Result<OrderFitReport, AsymError> {
    let mut sums = Vec::new();
    for &k in ladder {
        let mut terms = Vec::new();
        for mu in -2 * k..=2 * k {
            let diff = restricted_multiplicity(model, mu, k)? - direct_h_multiplicity(model, mu, k)?;
            if diff != 0 {
                terms.push(zeta.pow_c64(mu) * phi.value(&[mu as f64 / k as f64]) * diff as f64);
            }
        }
        sums.push(par::sum_c64(terms));
    }
    descent_report(&format!("{} restriction descent", model.name()), ladder, n, sums, phi, None)
}

fn descent_report(
    label: &str,
    ladder: &[i64],
    n: u32,
    sums: Vec<Complex64>,
    phi: &TestFunction,
    reference: Option<&LaurentDistSeries>,
) -> Result<OrderFitReport, AsymError> {
    let refs = match (reference, n) {
        (Some(s), n) if n >= 1 => ladder
            .iter()
            .map(|&k| s.series_pair(phi, n - 1, k))
            .collect::<Result<Vec<_>, _>>()?,
        _ => vec![Complex64::new(0.0, 0.0); ladder.len()],
    };
    fit_order(label, n as i32, ladder, sums, refs, Some(n as f64 - 0.5))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asymptotics::twisted_halfline_expansion;
    use crate::exact_series::Rational;
    use crate::group_orbits::uniform_grid;
    use crate::poly::Poly;
    use crate::quasipoly::{Piece, Polyhedron, QuasiPolynomial};

    #[test]
    fn restricted_examples() {
        let m = Model::su2_flag_square();
        assert_eq!(restricted_multiplicity(&m, 0, 2).unwrap(), 2);
        assert_eq!(restricted_multiplicity(&m, 1, 2).unwrap(), 0);
        assert_eq!(restricted_multiplicity(&m, 0, 1).unwrap(), 1);
        assert!(restricted_multiplicity(&Model::t_star_s1(), 0, 1).is_err());
    }

    #[test]
    fn direct_examples() {
        let m = Model::su2_flag_square();
        assert_eq!(direct_h_multiplicity(&m, 0, 2).unwrap(), 2);
        for k in 1..=20 {
            assert_eq!(direct_h_multiplicity(&m, 2 * k, k).unwrap(), 0);
            assert_eq!(direct_h_multiplicity(&m, 2 * k - 2, k).unwrap(), 1);
        }
    }

    #[test]
    fn restriction_holds_and_detects_defects() {
        for model in [Model::su2_flag_square(), Model::su2_orbit()] {
            let r = verify_restriction(&model, 30, 60).unwrap();
            assert!(r.pass, "{}", model.name());
            assert_eq!(r.rows.len(), 30 * 121);
        }
        let bad = Model::su2_flag_square().with_defect(&[3], 2, 1).unwrap();
        let r = verify_restriction(&bad, 5, 10).unwrap();
        assert!(!r.pass);
        let c = r.counterexample.clone().unwrap();
        assert_eq!(c.k, 2);
        assert!(c.mu.abs() <= 2 && c.restricted == c.direct + 1);
        assert!(r.to_csv().contains("2,-2,1,2,false"));
    }

    #[test]
    fn mystery_examples() {
        assert_eq!(mystery_check(&Model::su2_flag_square(), 1).unwrap(), MysteryCheck { k: 1, dim_total: 1, vol_sum: 1, equal: true });
        for k in [2, 7, 40] {
            let f = mystery_check(&Model::su2_flag_square(), k).unwrap();
            assert_eq!((f.dim_total, f.vol_sum), (k * k, k * k));
            let o = mystery_check(&Model::su2_orbit(), k).unwrap();
            assert_eq!((o.dim_total, o.vol_sum), (k, k));
        }
        assert!(mystery_check(&Model::t_star_s1(), 3).is_err());
    }

    #[test]
    fn pushforward_examples() {
        let grid = uniform_grid(-1.0, 1.0, 41);
        assert!(pushforward_orbit_check(1, &grid).unwrap() <= 1e-10);
        assert!(pushforward_orbit_check(2, &grid).unwrap() <= 1e-9);
        assert!(pushforward_orbit_check(7, &[0.0]).unwrap() <= 1e-12);
    }

    #[test]
    fn pushforward_of_lambda_two_is_box() {
        let beta = orbit_measure(&GroupData::Su2, &IrrepLabel::Su2(2)).unwrap();
        let pushed = beta.pushforward(&projection()).unwrap();
        let b = b_measure(&SubgroupPair::Su2Torus).unwrap();
        let rhs = b.convolve(&Distribution::delta(vec![-1.0]).add(&Distribution::delta(vec![1.0]))).unwrap();
        let f = TestFunction::univariate(&[1.0, 0.4, 0.3], 0.5, 1.3).unwrap();
        let want = Distribution::interval(-2.0, 2.0, 0.5).pair(&f).unwrap();
        assert!((pushed.pair(&f).unwrap() - want).norm() < 1e-12);
        assert!((rhs.pair(&f).unwrap() - want).norm() < 1e-12);
    }

    #[test]
    fn finite_level_identity() {
        let phis = [
            TestFunction::gaussian(1),
            TestFunction::univariate(&[0.5, 1.0, -0.2], 0.4, 0.7).unwrap(),
        ];
        for k in 1..=4 {
            assert!(finite_k_functoriality(&Model::su2_flag_square(), k, &phis).unwrap() <= 1e-9);
            assert!(finite_k_functoriality(&Model::su2_orbit(), k, &phis).unwrap() <= 1e-9);
        }
        let bad = Model::su2_flag_square().with_defect(&[1], 2, 1).unwrap();
        assert!(finite_k_functoriality(&bad, 2, &phis).unwrap() > 1e-3);
    }

    fn half_line_pqp(odd_only: bool) -> PiecewiseQP {
        let r = |n: i64| Rational::from_integer(n.into());
        let mut qp = QuasiPolynomial::new(1, 2).unwrap();
        for lam in 0..2 {
            for k in 0..2 {
                let v = if odd_only { lam } else { 1 };
                qp.set(vec![lam, k], Poly::constant(2, r(v))).unwrap();
            }
        }
        PiecewiseQP::new(1, vec![Piece { polyhedron: Polyhedron::interval(Some(r(0)), None), coeff: 1, qp }]).unwrap()
    }

    #[test]
    fn descent_examples() {
        let phi = TestFunction::univariate(&[1.0, 0.3], 0.2, 0.9).unwrap();
        let ladder = [8, 16, 32, 64];
        let zero = restriction_descent_check(&Model::su2_flag_square(), RootOfUnity::new(1, 4), &phi, &ladder, 6).unwrap();
        assert!(zero.pass && zero.converged_exactly);

        let zeta = RootOfUnity::new(1, 4);
        let reference = twisted_halfline_expansion(zeta, 0, 2, 4).unwrap();
        let r = twisted_descent_check(&half_line_pqp(true), zeta, &phi, &ladder, 3, Some(&reference)).unwrap();
        assert!(r.pass, "{}", r.summary_line());

        let neg = twisted_descent_check(&half_line_pqp(false), RootOfUnity::one(), &phi, &ladder, 1, None).unwrap();
        assert!(!neg.pass);
    }
}
