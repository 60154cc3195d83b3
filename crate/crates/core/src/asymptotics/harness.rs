use std::fmt::Write as _;

use num_complex::Complex64;
use serde::Serialize;

use super::{build_expansion, AsymError, MAX_EXPANSION_ORDER};
use crate::dist_calc::{Integrand, LaurentDistSeries};
use crate::models::Model;
use crate::par::{self, Exec};

/// Errors at or below `EXACT_REL_TOL·max(1, |exact|)` count as zero.
pub const EXACT_REL_TOL: f64 = 1e-13;

/// How many orders past the truncation are searched for the next nonzero term.
pub const LOOKAHEAD: u32 = 8;

/// Measured convergence of a truncated expansion on a `k`-ladder.
#[derive(Clone, Debug, PartialEq)]
pub struct OrderFitReport {
    pub label: String,
    /// The truncation keeps every power down to `k^{−n}`.
    pub n: i32,
    pub ladder: Vec<i64>,
    pub exact: Vec<Complex64>,
    pub truncated: Vec<Complex64>,
    pub abs_err: Vec<f64>,
    /// Decay rate: minus the least-squares slope of `log|err|` against `log k`.
    pub slope: Option<f64>,
    /// `None` when no omitted term is nonzero.
    pub target: Option<f64>,
    pub converged_exactly: bool,
    pub pass: bool,
    /// Largest truncation radius and tail bound used by the exact sums.
    pub radius: f64,
    pub tail_bound: f64,
}

/// Plain summary of an [`OrderFitReport`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitSummary {
    pub label: String,
    pub n: i32,
    pub ladder: Vec<i64>,
    pub slope: Option<f64>,
    pub target: Option<f64>,
    pub converged_exactly: bool,
    pub pass: bool,
    pub max_abs_err: f64,
    pub radius: f64,
    pub tail_bound: f64,
}

fn fmt_c(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{:.17e}", z.re)
    } else {
        format!("{:.17e}{:+.17e}i", z.re, z.im)
    }
}

impl OrderFitReport {
    /// Columns `k, exact, truncated, abs_err`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,exact,truncated,abs_err\n");
        for i in 0..self.ladder.len() {
            let _ = writeln!(
                out,
                "{},{},{},{:.6e}",
                self.ladder[i],
                fmt_c(self.exact[i]),
                fmt_c(self.truncated[i]),
                self.abs_err[i]
            );
        }
        out
    }

    pub fn summary_line(&self) -> String {
        let slope = self.slope.map_or("n/a".to_string(), |s| format!("{s:.3}"));
        let target = self.target.map_or("inf".to_string(), |t| format!("{t:.1}"));
        let verdict = match (self.converged_exactly, self.pass) {
            (true, _) => "converged exactly",
            (false, true) => "pass",
            (false, false) => "FAIL",
        };
        format!("{}: N={} slope={} target={} {}", self.label, self.n, slope, target, verdict)
    }

    pub fn summary(&self) -> FitSummary {
        FitSummary {
            label: self.label.clone(),
            n: self.n,
            ladder: self.ladder.clone(),
            slope: self.slope,
            target: self.target,
            converged_exactly: self.converged_exactly,
            pass: self.pass,
            max_abs_err: self.abs_err.iter().copied().fold(0.0, f64::max),
            radius: self.radius,
            tail_bound: self.tail_bound,
        }
    }
}

fn check_ladder(ladder: &[i64]) -> Result<(), AsymError> {
    if ladder.len() < 3 {
        return Err(AsymError::BadLadder("at least three levels are needed".into()));
    }
    if ladder[0] < 1 || ladder.windows(2).any(|w| w[0] >= w[1]) {
        return Err(AsymError::BadLadder("levels must be positive and strictly increasing".into()));
    }
    Ok(())
}

/// Least-squares slope of `y` against `x`.
pub fn ls_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// Assemble a report from exact and truncated values.
pub fn fit_order(
    label: &str,
    n: i32,
    ladder: &[i64],
    exact: Vec<Complex64>,
    truncated: Vec<Complex64>,
    target: Option<f64>,
) -> Result<OrderFitReport, AsymError> {
    check_ladder(ladder)?;
    let abs_err: Vec<f64> = exact.iter().zip(&truncated).map(|(e, t)| (e - t).norm()).collect();
    if abs_err.iter().any(|e| !e.is_finite()) {
        return Err(AsymError::NonFinite);
    }
    let converged_exactly = abs_err.iter().zip(&exact).all(|(e, x)| *e <= EXACT_REL_TOL * x.norm().max(1.0));
    let (xs, ys): (Vec<f64>, Vec<f64>) = ladder
        .iter()
        .zip(&abs_err)
        .filter(|(_, e)| **e > 0.0)
        .map(|(k, e)| ((*k as f64).ln(), e.ln()))
        .unzip();
    let slope = (xs.len() >= 3).then(|| -ls_slope(&xs, &ys));
    let pass = if converged_exactly {
        true
    } else {
        let s = slope.ok_or(AsymError::DegenerateFit { nonzero: xs.len() })?;
        target.is_some_and(|t| s >= t)
    };
    Ok(OrderFitReport {
        label: label.to_string(),
        n,
        ladder: ladder.to_vec(),
        exact,
        truncated,
        abs_err,
        slope,
        target,
        converged_exactly,
        pass,
        radius: 0.0,
        tail_bound: 0.0,
    })
}

/// Target decay: `(first nonzero θ_j with j > upto) − n₀ − ½`.
///
/// A series that stops at `upto` says nothing about later terms, so `θ_{upto+1}` is assumed nonzero.
pub fn next_order_target(series: &LaurentDistSeries, upto: u32) -> Option<f64> {
    if upto >= series.order() {
        return Some(upto as f64 + 1.0 - series.n0() as f64 - 0.5);
    }
    (upto + 1..=series.order())
        .find(|&j| (0..series.period()).any(|r| !series.coeff(j, r as i64).is_zero()))
        .map(|j| j as f64 - series.n0() as f64 - 0.5)
}

/// Compare `exact(k)` with `series` truncated at `k^{−n}` on the ladder.
pub fn exact_vs_series<I, F>(
    label: &str,
    series: &LaurentDistSeries,
    phi: &I,
    n: i32,
    ladder: &[i64],
    exact: F,
    exec: Exec,
) -> Result<OrderFitReport, AsymError>
where
    I: Integrand,
    F: Fn(i64) -> Result<(Complex64, f64, f64), AsymError> + Sync,
{
    check_ladder(ladder)?;
    let upto = n + series.n0();
    if upto < 0 || upto as u32 > series.order() {
        return Err(AsymError::OrderTooLarge { requested: upto.max(0) as u32, max: series.order() });
    }
    let upto = upto as u32;
    let rows = par::map(exec, ladder, |&k| -> Result<_, AsymError> {
        let (e, radius, tail) = exact(k)?;
        Ok((e, series.series_pair(phi, upto, k)?, radius, tail))
    });
    let rows: Vec<_> = rows.into_iter().collect::<Result<_, _>>()?;
    let target = next_order_target(series, upto);
    let mut report = fit_order(
        label,
        n,
        ladder,
        rows.iter().map(|r| r.0).collect(),
        rows.iter().map(|r| r.1).collect(),
        target,
    )?;
    report.radius = rows.iter().map(|r| r.2).fold(0.0, f64::max);
    report.tail_bound = rows.iter().map(|r| r.3).fold(0.0, f64::max);
    Ok(report)
}

/// Exact `⟨Θ_k, φ⟩` against [`build_expansion`] truncated at `k^{−n}`.
pub fn exact_vs_expansion<I: Integrand>(
    model: &Model,
    phi: &I,
    n: i32,
    ladder: &[i64],
) -> Result<OrderFitReport, AsymError> {
    exact_vs_expansion_with(model, phi, n, ladder, Exec::default())
}

pub fn exact_vs_expansion_with<I: Integrand>(
    model: &Model,
    phi: &I,
    n: i32,
    ladder: &[i64],
    exec: Exec,
) -> Result<OrderFitReport, AsymError> {
    let upto = n + model.half_dim() as i32;
    if upto < 0 {
        return Err(AsymError::BadLadder(format!("order {n} lies above the leading power")));
    }
    let upto = upto as u32;
    let order = (upto + LOOKAHEAD).min(MAX_EXPANSION_ORDER).max(upto);
    let series = match build_expansion(model, order) {
        Ok(s) => s,
        Err(AsymError::Unsupported(_)) if upto < order => build_expansion(model, upto)?,
        Err(e) => return Err(e),
    };
    exact_vs_series(&model.name(), &series, phi, n, ladder, |k| {
        let v = model.theta_pair_with(k, phi, exec)?;
        Ok((v.value, v.radius, v.tail_bound))
    }, exec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asymptotics::{em_fulllattice, fulllattice_sum};
    use crate::dist_calc::TestFunction;
    use crate::poly::Poly;

    #[test]
    fn slope_of_power_law() {
        let ladder = [8, 16, 32, 64];
        let exact: Vec<Complex64> = ladder.iter().map(|_| Complex64::new(1.0, 0.0)).collect();
        let trunc: Vec<Complex64> =
            ladder.iter().map(|&k| Complex64::new(1.0 + 3.0 * (k as f64).powi(-3), 0.0)).collect();
        let r = fit_order("p", 2, &ladder, exact, trunc, Some(2.5)).unwrap();
        assert!((r.slope.unwrap() - 3.0).abs() < 1e-9);
        assert!(r.pass && !r.converged_exactly);
        assert!(r.summary_line().ends_with("pass"));
        assert_eq!(r.to_csv().lines().count(), 5);
    }

    #[test]
    fn degenerate_and_bad_ladders() {
        let one = Complex64::new(1.0, 0.0);
        let err = fit_order("d", 0, &[1, 2, 3], vec![one; 3], vec![one, one, one * 2.0], Some(1.0));
        assert!(matches!(err, Err(AsymError::DegenerateFit { nonzero: 1 })));
        assert!(matches!(fit_order("b", 0, &[1, 2], vec![one; 2], vec![one; 2], None), Err(AsymError::BadLadder(_))));
        assert!(matches!(fit_order("b", 0, &[1, 3, 2], vec![one; 3], vec![one; 3], None), Err(AsymError::BadLadder(_))));
        let ok = fit_order("z", 0, &[1, 2, 3], vec![one; 3], vec![one; 3], None).unwrap();
        assert!(ok.converged_exactly && ok.pass && ok.slope.is_none());
    }

    #[test]
    fn t_star_s1_converges_exactly() {
        let r = exact_vs_expansion(&Model::t_star_s1(), &TestFunction::gaussian(1), 0, &[8, 16, 32]).unwrap();
        assert!(r.converged_exactly, "{}", r.summary_line());
        assert!(r.abs_err.iter().all(|e| *e <= 1e-10));
    }

    #[test]
    fn flag_square_leading_term_only() {
        let f = TestFunction::gaussian_poly(Poly::constant(3, 1.0), vec![0.3, 0.0, 0.3]).unwrap();
        let r = exact_vs_expansion(&Model::su2_flag_square(), &f, -2, &[8, 16, 32, 64]).unwrap();
        assert_eq!(r.target, Some(-1.5));
        assert!(r.pass, "{}", r.summary_line());
        assert!(exact_vs_expansion(&Model::su2_flag_square(), &f, -1, &[8, 16, 32]).is_err());
    }

    #[test]
    fn su2_orbit_has_zero_error() {
        let f = TestFunction::gaussian_poly(Poly::constant(3, 1.0), vec![0.2, 0.0, 0.4]).unwrap();
        let r = exact_vs_expansion(&Model::su2_orbit(), &f, 0, &[2, 3, 5]).unwrap();
        assert!(r.converged_exactly);
        assert!(r.abs_err.iter().all(|e| *e <= 1e-12));
    }

    #[test]
    fn complex_line_order_three() {
        let f = TestFunction::univariate(&[1.0, 0.5, -0.3], 0.7, 1.0).unwrap();
        let m = Model::complex_line(2, 0).unwrap();
        let r = exact_vs_expansion(&m, &f, 3, &[8, 16, 32, 64]).unwrap();
        assert_eq!(r.target, Some(4.5));
        assert!(r.pass, "{}", r.summary_line());
    }

    #[test]
    fn fulllattice_shifted_phi() {
        let f = TestFunction::univariate(&[1.0, 0.0, 1.0], 0.3, 1.0).unwrap();
        let s = em_fulllattice(12).unwrap();
        let r = exact_vs_series("full", &s, &f, 3, &[8, 16, 32, 64], |k| {
            let v = fulllattice_sum(k, &f)?;
            Ok((v.value, v.radius, v.tail_bound))
        }, Exec::Sequential)
        .unwrap();
        assert_eq!(r.target, Some(4.5));
        assert!(r.pass && !r.converged_exactly, "{}", r.summary_line());
    }
}
