use std::collections::BTreeMap;

use num_complex::Complex64;

use super::{DistError, Distribution, Integrand};
use crate::exact_series::{crational_to_c64, DiffOpSeries};

/// `k^{n₀} Σ_{n ≤ order} k^{−n} θ_n(k mod period)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentDistSeries {
    dim: usize,
    n0: i32,
    period: u64,
    order: u32,
    coeffs: BTreeMap<(u32, u64), Distribution>,
}

impl LaurentDistSeries {
    pub fn new(dim: usize, n0: i32, period: u64, order: u32) -> Result<Self, DistError> {
        if period == 0 {
            return Err(DistError::Unsupported("period must be at least 1".into()));
        }
        Ok(LaurentDistSeries { dim, n0, period, order, coeffs: BTreeMap::new() })
    }

    /// The series with `θ_0 = d` and all other coefficients zero through `order`.
    pub fn leading(n0: i32, d: Distribution, order: u32) -> Self {
        let mut s = LaurentDistSeries::new(d.dim(), n0, 1, order).expect("period 1");
        s.coeffs.insert((0, 0), d);
        s
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n0(&self) -> i32 {
        self.n0
    }

    pub fn period(&self) -> u64 {
        self.period
    }

    /// Highest index `n` for which `θ_n` is known.
    pub fn order(&self) -> u32 {
        self.order
    }

    /// Set `θ_n` on the residue class `k ≡ residue (mod period)`.
    pub fn set(&mut self, n: u32, residue: u64, d: Distribution) -> Result<(), DistError> {
        if d.dim() != self.dim {
            return Err(DistError::DimensionMismatch { expected: self.dim, got: d.dim() });
        }
        if n > self.order || residue >= self.period {
            return Err(DistError::Unsupported(format!("coefficient ({n}, {residue}) outside the series")));
        }
        if d.is_zero() {
            self.coeffs.remove(&(n, residue));
        } else {
            self.coeffs.insert((n, residue), d);
        }
        Ok(())
    }

    /// Set `θ_n` on every residue class.
    pub fn set_all(&mut self, n: u32, d: Distribution) -> Result<(), DistError> {
        for r in 0..self.period {
            self.set(n, r, d.clone())?;
        }
        Ok(())
    }

    /// `θ_n(k)`.
    pub fn coeff(&self, n: u32, k: i64) -> Distribution {
        let r = k.rem_euclid(self.period as i64) as u64;
        self.coeffs.get(&(n, r)).cloned().unwrap_or_else(|| Distribution::zero(self.dim))
    }

    /// The coefficient of `k^p`, i.e. `θ_{n₀−p}(k)`; zero outside the stored range.
    pub fn coeff_at_power(&self, p: i32, k: i64) -> Distribution {
        let n = self.n0 - p;
        if n < 0 || n as u32 > self.order {
            return Distribution::zero(self.dim);
        }
        self.coeff(n as u32, k)
    }

    /// `k^{n₀} Σ_{n ≤ upto} k^{−n} ⟨θ_n(k), φ⟩`.
    pub fn series_pair<I: Integrand>(&self, phi: &I, upto: u32, k: i64) -> Result<Complex64, DistError> {
        if upto > self.order {
            return Err(DistError::OrderExhausted { requested: upto, available: self.order });
        }
        let kf = k as f64;
        let mut terms = Vec::new();
        for n in 0..=upto {
            let d = self.coeff(n, k);
            if !d.is_zero() {
                terms.push(d.pair(phi)? * kf.powi(self.n0 - n as i32));
            }
        }
        Ok(crate::par::sum_c64(terms))
    }

    /// `Σ_n k^{−n} Σ_{l+m=n} p_l(i∂) θ_m`, through order `upto`.
    pub fn apply_diff_op(&self, op: &DiffOpSeries, upto: u32) -> Result<Self, DistError> {
        if op.nvars() != self.dim {
            return Err(DistError::DimensionMismatch { expected: self.dim, got: op.nvars() });
        }
        if upto > self.order {
            return Err(DistError::OrderExhausted { requested: upto, available: self.order });
        }
        if upto > op.max_order() {
            return Err(DistError::OrderExhausted { requested: upto, available: op.max_order() });
        }
        let mut out = LaurentDistSeries::new(self.dim, self.n0, self.period, upto)?;
        for n in 0..=upto {
            for r in 0..self.period {
                let mut acc = Distribution::zero(self.dim);
                for l in 0..=n {
                    let Some(theta) = self.coeffs.get(&(n - l, r)) else { continue };
                    for (alpha, coef) in op.derivative_terms(l) {
                        acc = acc.add(&theta.derivative(&alpha).scale(crational_to_c64(&coef)));
                    }
                }
                out.set(n, r, acc.expand_boundary())?;
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist_calc::TestFunction;
    use crate::exact_series::{germ_taylor, rat, to_diff_op, Germ, PowerSeries};

    fn phi() -> TestFunction {
        TestFunction::univariate(&[1.0, -0.4, 0.2], 0.3, 1.1).unwrap()
    }

    #[test]
    fn single_delta_series() {
        let s = LaurentDistSeries::leading(0, Distribution::delta(vec![0.0]), 4);
        let f = phi();
        for k in [1, 7, 20] {
            assert!((s.series_pair(&f, 3, k).unwrap().re - f.eval(&[0.0])).abs() < 1e-15);
        }
        assert!(matches!(s.series_pair(&f, 5, 1), Err(DistError::OrderExhausted { .. })));
    }

    #[test]
    fn periodic_coefficient() {
        let mut s = LaurentDistSeries::new(1, 0, 2, 0).unwrap();
        s.set(0, 0, Distribution::delta(vec![0.0])).unwrap();
        s.set(0, 1, Distribution::delta(vec![0.0]).scale(Complex64::new(-1.0, 0.0))).unwrap();
        let f = phi();
        assert!((s.series_pair(&f, 0, 3).unwrap().re + f.eval(&[0.0])).abs() < 1e-15);
    }

    #[test]
    fn two_leading_em_terms() {
        // k·1_{[0,∞)} + ½δ_0 at k = 10 against exp(−ξ²)
        let mut s = LaurentDistSeries::new(1, 1, 1, 1).unwrap();
        s.set(0, 0, Distribution::half_line(0.0)).unwrap();
        s.set(1, 0, Distribution::delta(vec![0.0]).scale(Complex64::new(0.5, 0.0))).unwrap();
        let v = s.series_pair(&TestFunction::gaussian(1), 1, 10).unwrap();
        assert!((v.re - (10.0 * std::f64::consts::PI.sqrt() / 2.0 + 0.5)).abs() < 1e-13);
    }

    #[test]
    fn identity_and_second_order_operator() {
        let f = phi();
        let s = LaurentDistSeries::leading(0, Distribution::half_line(0.4), 4);
        let id = DiffOpSeries::identity(1, 4);
        let same = s.apply_diff_op(&id, 4).unwrap();
        assert!((same.series_pair(&f, 4, 5).unwrap() - s.series_pair(&f, 4, 5).unwrap()).norm() < 1e-14);
        // X²/6 gives (1/6) φ′(a) at order 2
        let op = to_diff_op(&PowerSeries::univariate(&[rat(0, 1), rat(0, 1), rat(1, 6)], 4));
        let t = s.apply_diff_op(&op, 4).unwrap();
        let v = t.coeff(2, 1).pair(&f).unwrap();
        assert!((v.re - f.derivative(&[1]).eval(&[0.4]) / 6.0).abs() < 1e-14);
        assert!(matches!(s.apply_diff_op(&DiffOpSeries::identity(1, 2), 3), Err(DistError::OrderExhausted { .. })));
    }

    #[test]
    fn x_over_sin_on_half_line() {
        // (k/2)·1_{[a,∞)} under X/sin X: order-2 coefficient pairs as φ′(a)/12
        let f = phi();
        let a = -0.2;
        let germ: Germ = "x_over_sin(2)".parse().unwrap();
        let op = to_diff_op(&germ_taylor(&germ, 6).unwrap());
        let s = LaurentDistSeries::leading(1, Distribution::half_line(a).scale(Complex64::new(0.5, 0.0)), 6);
        let t = s.apply_diff_op(&op, 6).unwrap();
        let v = t.coeff_at_power(-1, 1).pair(&f).unwrap();
        assert!((v.re - f.derivative(&[1]).eval(&[a]) / 12.0).abs() < 1e-14);
        assert!(t.coeff(1, 1).is_zero());
    }
}
