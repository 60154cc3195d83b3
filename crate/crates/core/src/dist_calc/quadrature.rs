use std::sync::OnceLock;

use num_complex::Complex64;

use super::DistError;

/// Points per Gauss–Legendre panel.
pub const PANEL: usize = 20;
/// Hard cap on integrand evaluations for one 1-D integral.
pub const MAX_NODES: usize = 1 << 14;

/// Gauss–Legendre nodes and weights on `[−1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut xs = vec![0.0; n];
    let mut ws = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=n {
                let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        xs[i] = -x;
        xs[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        ws[i] = w;
        ws[n - 1 - i] = w;
    }
    (xs, ws)
}

fn panel_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(PANEL))
}

/// Tolerances for adaptive quadrature.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quad {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_nodes: usize,
}

impl Default for Quad {
    fn default() -> Self {
        Quad { abs_tol: 1e-14, rel_tol: 1e-15, max_nodes: MAX_NODES }
    }
}

fn panel<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> Complex64 {
    let (xs, ws) = panel_rule();
    let (m, h) = (0.5 * (a + b), 0.5 * (b - a));
    let mut acc = Complex64::new(0.0, 0.0);
    for (x, w) in xs.iter().zip(ws) {
        acc += f(m + h * x) * *w;
    }
    acc * h
}

/// Adaptive Gauss–Legendre on a finite interval.
pub fn integrate<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, q: &Quad) -> Result<Complex64, DistError> {
    if a == b {
        return Ok(Complex64::new(0.0, 0.0));
    }
    assert!(a.is_finite() && b.is_finite(), "quadrature interval must be finite");
    const START: usize = 4;
    let h = (b - a) / START as f64;
    let mut work: Vec<(f64, f64, Complex64)> = (0..START)
        .map(|i| {
            let lo = a + h * i as f64;
            let hi = if i + 1 == START { b } else { lo + h };
            (lo, hi, panel(&f, lo, hi))
        })
        .collect();
    let mut nodes = START * PANEL;
    let estimate: Complex64 = work.iter().map(|w| w.2).sum();
    let tol = q.abs_tol.max(q.rel_tol * estimate.norm());
    let total = (b - a).abs();
    let mut done = Vec::new();
    while let Some((lo, hi, coarse)) = work.pop() {
        let mid = 0.5 * (lo + hi);
        let (l, r) = (panel(&f, lo, mid), panel(&f, mid, hi));
        nodes += 2 * PANEL;
        let fine = l + r;
        let local = tol * ((hi - lo).abs() / total).max(1e-3);
        if (fine - coarse).norm() <= local || (hi - lo).abs() < total * 1e-12 {
            done.push(fine);
        } else {
            if nodes > q.max_nodes {
                return Err(DistError::Quadrature { nodes, residual: (fine - coarse).norm() });
            }
            work.push((lo, mid, l));
            work.push((mid, hi, r));
        }
    }
    done.sort_by(|x, y| x.norm().total_cmp(&y.norm()));
    Ok(crate::par::sum_c64(done))
}

/// Iterated adaptive quadrature over a box of dimension 0, 1 or 2.
pub fn integrate_box<F: Fn(&[f64]) -> Complex64>(
    f: F,
    lo: &[f64],
    hi: &[f64],
    q: &Quad,
) -> Result<Complex64, DistError> {
    match lo.len() {
        0 => Ok(f(&[])),
        1 => integrate(|s| f(&[s]), lo[0], hi[0], q),
        2 => {
            let inner_err = std::cell::Cell::new(None);
            let v = integrate(
                |s| match integrate(|t| f(&[s, t]), lo[1], hi[1], q) {
                    Ok(v) => v,
                    Err(e) => {
                        inner_err.set(Some(e));
                        Complex64::new(0.0, 0.0)
                    }
                },
                lo[0],
                hi[0],
                q,
            )?;
            match inner_err.take() {
                Some(e) => Err(e),
                None => Ok(v),
            }
        }
        d => Err(DistError::Unsupported(format!("quadrature over {d} parameters"))),
    }
}

/// Periodic trapezoid rule on `[0, 2π)`, doubling until two levels agree.
pub fn integrate_periodic<F: Fn(f64) -> Complex64>(f: F, q: &Quad) -> Result<Complex64, DistError> {
    let tau = std::f64::consts::TAU;
    let rule = |n: usize| -> Complex64 {
        let h = tau / n as f64;
        (0..n).map(|i| f(h * i as f64)).sum::<Complex64>() * h
    };
    let mut n = 16;
    let mut prev = rule(n);
    while n <= q.max_nodes / 2 {
        n *= 2;
        let next = rule(n);
        if (next - prev).norm() <= q.abs_tol.max(q.rel_tol * next.norm()) {
            return Ok(next);
        }
        prev = next;
    }
    Err(DistError::Quadrature { nodes: n, residual: f64::NAN })
}
