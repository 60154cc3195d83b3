use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};

use super::AsymError;
use crate::dist_calc::{Distribution, Integrand, LaurentDistSeries};
use crate::exact_series::{
    bernoulli_number, bernoulli_polynomial, binomial, germ_taylor, lerch_s, rat, to_diff_op, Rational, RootOfUnity,
};
use crate::models::{Model, ModelKind, ThetaValue, TAIL_TOLERANCE};
use crate::par::{self, Exec};

/// Largest `θ`-index the expansion builders accept.
pub const MAX_EXPANSION_ORDER: u32 = 16;

fn check_order(n: u32) -> Result<(), AsymError> {
    if n > MAX_EXPANSION_ORDER {
        return Err(AsymError::OrderTooLarge { requested: n, max: MAX_EXPANSION_ORDER });
    }
    Ok(())
}

fn real(x: &Rational) -> Complex64 {
    Complex64::new(x.to_f64().unwrap_or(f64::NAN), 0.0)
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::from(1), |acc, i| acc * BigInt::from(i))
}

/// `j^{1/2}(i∂/k) (k^d Σ_n k^{−n} DH(Â_n))` through `θ_n`.
pub fn build_expansion(model: &Model, n: u32) -> Result<LaurentDistSeries, AsymError> {
    check_order(n)?;
    let d = model.half_dim() as i32;
    let base = model.dh_base()?;
    match model.germ() {
        Some(germ) => {
            let a_hat = germ_taylor(&germ, n)?;
            let duflo = germ_taylor(&model.duflo_germ(), n)?;
            let op = to_diff_op(&duflo.multiply(&a_hat));
            Ok(LaurentDistSeries::leading(d, base, n).apply_diff_op(&op, n)?)
        }
        None => match model.kind() {
            // Θ_k = k·rescale_k(β_k) = k·sphere(1, 1) exactly
            ModelKind::Su2Orbit => Ok(LaurentDistSeries::leading(d, base, n)),
            ModelKind::Su2FlagSquare if n == 0 => Ok(LaurentDistSeries::leading(d, base, 0)),
            ModelKind::Su2FlagSquare => {
                Err(AsymError::Unsupported(format!("order {n} for {}: only θ_0 is available", model.name())))
            }
            _ => Err(AsymError::Unsupported(format!("no expansion data for {}", model.name()))),
        },
    }
}

/// `(index n, derivative order, c)` with `⟨θ_n, φ⟩ = c·φ^{(order)}(0)` for
/// the boundary terms of `Σ_{λ∈ℕ} δ_{λ/k}`.
pub fn em_fulllattice_coefficients(n: u32) -> Vec<(u32, u32, Rational)> {
    (1..=n)
        .map(|i| match i {
            1 => (1, 0, rat(1, 2)),
            _ if i % 2 == 1 => (i, i - 1, Rational::zero()),
            _ => (i, i - 1, -bernoulli_number(i) / Rational::from_integer(factorial(i))),
        })
        .collect()
}

/// `k·1_{[0,∞)} + ½δ_0 + Σ_j k^{1−2j} (b_{2j}/(2j)!) δ_0^{(2j−1)}`, through `θ_n`.
pub fn em_fulllattice(n: u32) -> Result<LaurentDistSeries, AsymError> {
    check_order(n)?;
    let mut s = LaurentDistSeries::leading(1, Distribution::half_line(0.0), n);
    for (i, order, c) in em_fulllattice_coefficients(n) {
        // ⟨w δ^{(m)}, φ⟩ = (−1)^m w φ^{(m)}(0)
        let sign = if order % 2 == 1 { -1.0 } else { 1.0 };
        s.set_all(i, Distribution::delta_derivative(vec![0.0], vec![order], real(&c) * sign))?;
    }
    Ok(s)
}

/// `(index n, c)` with `⟨θ_n, φ⟩ = c·φ^{(n−1)}(a)` for the step-`w` half-line,
/// `c = −w^{n−1} B_n(½)/n!`.
pub fn em_halfline_coefficients(w: i64, n: u32) -> Vec<(u32, Rational)> {
    let half = rat(1, 2);
    (1..=n)
        .map(|i| {
            let wp = Rational::from_integer(BigInt::from(w).pow(i - 1));
            (i, -wp * bernoulli_polynomial(i, &half) / Rational::from_integer(factorial(i)))
        })
        .collect()
}

/// Series of `Σ_{j≥0} δ_{a + (j+½)w/k}`: `(k/w)·1_{[a,∞)}` plus boundary terms.
pub fn em_halfline(a: f64, w: i64, n: u32) -> Result<LaurentDistSeries, AsymError> {
    check_order(n)?;
    if w < 2 || w % 2 != 0 {
        return Err(AsymError::OddWeight(w));
    }
    let lead = Distribution::interval(a, f64::INFINITY, 1.0 / w as f64);
    let mut s = LaurentDistSeries::leading(1, lead, n);
    for (i, c) in em_halfline_coefficients(w, n) {
        let sign = if (i - 1) % 2 == 1 { -1.0 } else { 1.0 };
        s.set_all(i, Distribution::delta_derivative(vec![a], vec![i - 1], real(&c) * sign))?;
    }
    Ok(s)
}

/// `c_m = (1/m!) Σ_i C(m,i) (w/2)^{m−i} w^i S_i(ζ^w)`: the twisted half-line
/// sum pairs as `ζ^{ka+w/2} Σ_m k^{−m} c_m φ^{(m)}(a)`.
pub fn twisted_halfline_coefficients(zeta: RootOfUnity, w: i64, n: u32) -> Result<Vec<Complex64>, AsymError> {
    let zw = zeta.pow(w);
    if zw.is_one() {
        return Err(AsymError::TrivialTwist);
    }
    let s: Vec<Complex64> = (0..=n).map(|i| lerch_s(zw, i).map(|v| v.to_c64())).collect::<Result<_, _>>()?;
    let b = w as f64 / 2.0;
    Ok((0..=n)
        .map(|m| {
            let mut acc = Complex64::zero();
            for i in 0..=m {
                let c = binomial(m, i).to_f64().unwrap_or(f64::NAN) * b.powi((m - i) as i32) * (w as f64).powi(i as i32);
                acc += s[i as usize] * c;
            }
            acc / factorial(m).to_f64().unwrap_or(f64::NAN)
        })
        .collect())
}

/// Series of `Σ_{j≥0} ζ^μ δ_{μ/k}`, `μ = ka + w/2 + jw`, periodic in `k`
/// modulo the order of `ζ`; there is no volume term.
pub fn twisted_halfline_expansion(zeta: RootOfUnity, a: i64, w: i64, n: u32) -> Result<LaurentDistSeries, AsymError> {
    check_order(n)?;
    if w < 2 || w % 2 != 0 {
        return Err(AsymError::OddWeight(w));
    }
    let c = twisted_halfline_coefficients(zeta, w, n)?;
    let q = zeta.order();
    let mut s = LaurentDistSeries::new(1, 0, q, n)?;
    for res in 0..q {
        let phase = zeta.pow_c64(res as i64 * a + w / 2);
        for m in 0..=n {
            let sign = if m % 2 == 1 { -1.0 } else { 1.0 };
            let weight = phase * c[m as usize] * sign;
            s.set(m, res, Distribution::delta_derivative(vec![a as f64], vec![m], weight))?;
        }
    }
    Ok(s)
}

/// `Σ_{n≥0} φ(n/k)` with a tail certificate.
pub fn fulllattice_sum<I: Integrand>(k: i64, phi: &I) -> Result<ThetaValue, AsymError> {
    fulllattice_sum_with(k, phi, Exec::default())
}

pub fn fulllattice_sum_with<I: Integrand>(k: i64, phi: &I, exec: Exec) -> Result<ThetaValue, AsymError> {
    if phi.dim() != 1 {
        return Err(AsymError::Unsupported("the full-lattice sum is one-dimensional".into()));
    }
    let kf = k as f64;
    let scale = 1.0 + kf;
    let tol = TAIL_TOLERANCE / scale;
    let radius = phi.tail_radius(tol, 3).ok_or(AsymError::NoCertificate)?;
    let reach = (kf * radius).ceil() as i64;
    let values = par::map_range(exec, 0..reach + 1, |n| phi.value(&[n as f64 / kf]));
    Ok(ThetaValue { value: par::sum_c64(values), radius, tail_bound: tol * scale, atoms: (reach + 1) as usize })
}
