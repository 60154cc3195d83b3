use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::DistError;
use crate::poly::Poly;

/// `p(ξ)·exp(−(ξ−c)ᵀA(ξ−c))`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussTerm {
    pub poly: Poly<f64>,
    pub center: Vec<f64>,
    pub form: Vec<Vec<f64>>,
}

impl GaussTerm {
    fn quad_form(&self, x: &[f64]) -> f64 {
        let d: Vec<f64> = x.iter().zip(&self.center).map(|(a, b)| a - b).collect();
        let mut q = 0.0;
        for (i, di) in d.iter().enumerate() {
            for (j, dj) in d.iter().enumerate() {
                q += di * self.form[i][j] * dj;
            }
        }
        q
    }

    fn eval(&self, x: &[f64]) -> f64 {
        self.poly.eval_f64(x) * (-self.quad_form(x)).exp()
    }

    /// `∂_i Q` as a polynomial.
    fn grad_form(&self, i: usize) -> Poly<f64> {
        let n = self.center.len();
        let mut g = Poly::zero(n);
        let mut c = 0.0;
        for j in 0..n {
            let a = self.form[i][j] + self.form[j][i];
            g = &g + &Poly::var(n, j).scale(&a);
            c -= a * self.center[j];
        }
        &g + &Poly::constant(n, c)
    }

    fn derivative(&self, i: usize) -> GaussTerm {
        let p = &self.poly.derivative(i) - &(&self.poly * &self.grad_form(i));
        GaussTerm { poly: p, center: self.center.clone(), form: self.form.clone() }
    }

    fn min_eigenvalue(&self) -> f64 {
        let n = self.center.len();
        if n == 0 {
            return f64::INFINITY;
        }
        let m = DMatrix::from_fn(n, n, |i, j| 0.5 * (self.form[i][j] + self.form[j][i]));
        SymmetricEigen::new(m).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Finite sum of polynomial-times-Gaussian terms on `ℝ^dim`.
#[derive(Clone, Debug, PartialEq)]
pub struct TestFunction {
    dim: usize,
    terms: Vec<GaussTerm>,
}

impl TestFunction {
    /// A single term; the quadratic form must be symmetric positive definite.
    pub fn new(poly: Poly<f64>, center: Vec<f64>, form: Vec<Vec<f64>>) -> Result<Self, DistError> {
        let dim = center.len();
        if poly.nvars() != dim || form.len() != dim || form.iter().any(|r| r.len() != dim) {
            return Err(DistError::DimensionMismatch { expected: dim, got: poly.nvars() });
        }
        let t = GaussTerm { poly, center, form };
        if dim > 0 && t.min_eigenvalue() <= 0.0 {
            return Err(DistError::NotPositiveDefinite);
        }
        Ok(TestFunction { dim, terms: vec![t] })
    }

    /// `p(ξ)·exp(−|ξ−c|²)`.
    pub fn gaussian_poly(poly: Poly<f64>, center: Vec<f64>) -> Result<Self, DistError> {
        let n = center.len();
        let form = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
        Self::new(poly, center, form)
    }

    /// `exp(−|ξ|²)`.
    pub fn gaussian(dim: usize) -> Self {
        Self::gaussian_poly(Poly::one(dim), vec![0.0; dim]).expect("identity form")
    }

    /// One-variable `p(ξ)·exp(−s(ξ−c)²)` from coefficients `p_0, p_1, …`.
    pub fn univariate(coeffs: &[f64], center: f64, width: f64) -> Result<Self, DistError> {
        let p = Poly::from_terms(1, coeffs.iter().enumerate().map(|(i, c)| (vec![i as u32], *c)));
        Self::new(p, vec![center], vec![vec![width]])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[GaussTerm] {
        &self.terms
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        TestFunction { dim: self.dim, terms }
    }

    pub fn scale(&self, c: f64) -> Self {
        let terms = self.terms.iter().map(|t| GaussTerm { poly: t.poly.scale(&c), ..t.clone() }).collect();
        TestFunction { dim: self.dim, terms }
    }

    pub fn mul_poly(&self, p: &Poly<f64>) -> Self {
        let terms = self.terms.iter().map(|t| GaussTerm { poly: &t.poly * p, ..t.clone() }).collect();
        TestFunction { dim: self.dim, terms }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        self.terms.iter().map(|t| t.eval(x)).sum()
    }

    /// Mixed partial derivative `∂^α φ`, in closed form.
    pub fn derivative(&self, alpha: &[u32]) -> Self {
        let mut terms = self.terms.clone();
        for (i, &a) in alpha.iter().enumerate() {
            for _ in 0..a {
                terms = terms.iter().map(|t| t.derivative(i)).collect();
            }
        }
        terms.retain(|t| !t.poly.is_zero());
        TestFunction { dim: self.dim, terms }
    }

    /// `x ↦ φ(x/k)`.
    pub fn dilate(&self, k: f64) -> Self {
        let n = self.dim;
        let subs: Vec<Poly<f64>> = (0..n).map(|i| Poly::var(n, i).scale(&(1.0 / k))).collect();
        let terms = self
            .terms
            .iter()
            .map(|t| GaussTerm {
                poly: t.poly.compose(&subs),
                center: t.center.iter().map(|c| c * k).collect(),
                form: t.form.iter().map(|r| r.iter().map(|a| a / (k * k)).collect()).collect(),
            })
            .collect();
        TestFunction { dim: n, terms }
    }

    /// `x ↦ φ(Lx)` for a linear map `L: ℝ^m → ℝ^dim` (rows of length `m`).
    /// The result may have a degenerate quadratic form.
    pub fn pullback(&self, l: &[Vec<f64>]) -> Self {
        assert_eq!(l.len(), self.dim);
        let m = l.first().map_or(0, Vec::len);
        let subs: Vec<Poly<f64>> = l
            .iter()
            .map(|row| Poly::from_terms(m, row.iter().enumerate().map(|(j, &v)| (unit(m, j), v))))
            .collect();
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let lal: Vec<Vec<f64>> = (0..m)
                    .map(|i| {
                        (0..m)
                            .map(|j| {
                                let mut s = 0.0;
                                for a in 0..self.dim {
                                    for b in 0..self.dim {
                                        s += l[a][i] * t.form[a][b] * l[b][j];
                                    }
                                }
                                s
                            })
                            .collect()
                    })
                    .collect();
                pullback_term(t, l, lal, m, &subs)
            })
            .collect();
        TestFunction { dim: m, terms }
    }

    /// Radius `R` with `|φ(x)|·(1+|x|)^extra ≤ tol` whenever `|x| ≥ R`, or
    /// `None` when some quadratic form is degenerate.
    pub fn tail_radius(&self, tol: f64, extra_degree: u32) -> Option<f64> {
        let mut r: f64 = 0.0;
        let share = tol / self.terms.len().max(1) as f64;
        for t in &self.terms {
            let lam = t.min_eigenvalue();
            if lam <= 1e-12 {
                return None;
            }
            let c: f64 = t.center.iter().map(|x| x * x).sum::<f64>().sqrt();
            let deg = (t.poly.degree().unwrap_or(0) + extra_degree) as f64;
            let l1 = t.poly.l1_norm().max(f64::MIN_POSITIVE);
            // log bound: ln l1 + deg ln(1+R) − λ(R−|c|)², decreasing once 2λ(R−|c|) ≥ deg
            let bound = |rr: f64| l1.ln() + deg * (1.0 + rr).ln() - lam * (rr - c).powi(2);
            let mut rr = c + (deg / (2.0 * lam)).max(1.0);
            while bound(rr) > share.ln() {
                rr += 0.25;
            }
            r = r.max(rr);
        }
        Some(r)
    }
}

fn unit(m: usize, j: usize) -> Vec<u32> {
    let mut e = vec![0; m];
    e[j] = 1;
    e
}

/// Pull back one term. The quadratic `(Lx−c)ᵀA(Lx−c)` equals
/// `(x−x0)ᵀ(LᵀAL)(x−x0) + κ` where `x0` minimizes it; `κ ≥ 0` becomes a
/// constant factor.
fn pullback_term(t: &GaussTerm, l: &[Vec<f64>], lal: Vec<Vec<f64>>, m: usize, subs: &[Poly<f64>]) -> GaussTerm {
    let n = t.center.len();
    // b = LᵀA c
    let ac: Vec<f64> = (0..n).map(|a| (0..n).map(|b| t.form[a][b] * t.center[b]).sum()).collect();
    let rhs: Vec<f64> = (0..m).map(|i| (0..n).map(|a| l[a][i] * ac[a]).sum()).collect();
    let mat = DMatrix::from_fn(m, m, |i, j| lal[i][j]);
    let x0: Vec<f64> = match mat.clone().pseudo_inverse(1e-13) {
        Ok(pinv) => (0..m).map(|i| (0..m).map(|j| pinv[(i, j)] * rhs[j]).sum()).collect(),
        Err(_) => vec![0.0; m],
    };
    let lx0: Vec<f64> = (0..n).map(|a| (0..m).map(|i| l[a][i] * x0[i]).sum()).collect();
    let probe = GaussTerm { poly: Poly::one(n), center: t.center.clone(), form: t.form.clone() };
    let kappa = probe.quad_form(&lx0);
    GaussTerm { poly: t.poly.compose(subs).scale(&(-kappa).exp()), center: x0, form: lal }
}

/// Anything a distribution can be paired with.
pub trait Integrand: Sync {
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> Complex64;
    fn derivative(&self, alpha: &[u32]) -> Self
    where
        Self: Sized;
    /// See [`TestFunction::tail_radius`]; `None` if the integrand does not decay.
    fn tail_radius(&self, tol: f64, extra_degree: u32) -> Option<f64>;
}

impl Integrand for TestFunction {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, x: &[f64]) -> Complex64 {
        Complex64::new(self.eval(x), 0.0)
    }
    fn derivative(&self, alpha: &[u32]) -> Self {
        TestFunction::derivative(self, alpha)
    }
    fn tail_radius(&self, tol: f64, extra_degree: u32) -> Option<f64> {
        TestFunction::tail_radius(self, tol, extra_degree)
    }
}

/// `c·e^{i⟨ξ, X⟩}`.
#[derive(Clone, Debug, PartialEq)]
pub struct PlaneWave {
    pub freq: Vec<f64>,
    pub coeff: Complex64,
}

impl Integrand for PlaneWave {
    fn dim(&self) -> usize {
        self.freq.len()
    }
    fn value(&self, x: &[f64]) -> Complex64 {
        let phase: f64 = x.iter().zip(&self.freq).map(|(a, b)| a * b).sum();
        self.coeff * Complex64::new(0.0, phase).exp()
    }
    fn derivative(&self, alpha: &[u32]) -> Self {
        let mut c = self.coeff;
        for (x, &a) in self.freq.iter().zip(alpha) {
            c *= Complex64::new(0.0, *x).powu(a);
        }
        PlaneWave { freq: self.freq.clone(), coeff: c }
    }
    fn tail_radius(&self, _tol: f64, _extra: u32) -> Option<f64> {
        None
    }
}
