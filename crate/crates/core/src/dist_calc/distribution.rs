use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use super::quadrature::{integrate, integrate_box, integrate_periodic, Quad};
use super::testfn::{Integrand, PlaneWave};
use super::DistError;
use crate::par::{self, Exec};
use crate::poly::Poly;

/// Underlying measure of a [`Term`].
#[derive(Clone, Debug, PartialEq)]
pub enum Support {
    /// `φ ↦ φ(point)`.
    Delta { point: Vec<f64> },
    /// `φ ↦ ∫_{lower ≤ s ≤ upper} q(s) φ(origin + Σ s_i g_i) ds`. Bounds may be
    /// infinite. Covers intervals, half-lines, boxes, orthant cones and their
    /// linear images.
    Density { origin: Vec<f64>, generators: Vec<Vec<f64>>, lower: Vec<f64>, upper: Vec<f64>, density: Poly<f64> },
    /// Uniform measure of total `mass` on the centered sphere of `radius` in `ℝ³`.
    /// The distinguished axis is the last coordinate.
    Sphere { radius: f64, mass: f64 },
    /// `φ ↦ ∫_{inner}^{outer} q(s) ⟨σ_s, φ⟩ ds` with `σ_s` the unit-mass sphere of radius `s`.
    Shell { inner: f64, outer: f64, density: Poly<f64> },
}

/// `weight · ∂^deriv (support)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub support: Support,
    pub deriv: Vec<u32>,
    pub weight: Complex64,
}

/// Finite sum of terms on `ℝ^dim`.
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution {
    dim: usize,
    terms: Vec<Term>,
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn mat_vec(l: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    l.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

/// `∫_lo^hi q ds_i`, removing variable `i`.
fn integrate_out(q: &Poly<f64>, i: usize, lo: f64, hi: f64) -> Poly<f64> {
    let n = q.nvars();
    let mut out = Poly::zero(n - 1);
    for (e, coef) in q.terms() {
        let p = e[i] as i32 + 1;
        let v = coef * (hi.powi(p) - lo.powi(p)) / p as f64;
        let mut ne = e.clone();
        ne.remove(i);
        out.add_term(ne, v);
    }
    out
}

/// Append `extra` unused variables after the existing ones (or before, when `front`).
fn pad_vars(q: &Poly<f64>, extra: usize, front: bool) -> Poly<f64> {
    let n = q.nvars();
    Poly::from_terms(
        n + extra,
        q.terms().map(|(e, coef)| {
            let mut ne = vec![0; n + extra];
            let off = if front { extra } else { 0 };
            ne[off..off + n].copy_from_slice(e);
            (ne, *coef)
        }),
    )
}

impl Term {
    fn is_compact(&self) -> bool {
        match &self.support {
            Support::Density { lower, upper, .. } => lower.iter().chain(upper).all(|x| x.is_finite()),
            _ => true,
        }
    }
}

impl Distribution {
    pub fn zero(dim: usize) -> Self {
        Distribution { dim, terms: Vec::new() }
    }

    pub fn from_terms(dim: usize, terms: Vec<Term>) -> Result<Self, DistError> {
        let mut d = Distribution::zero(dim);
        for t in terms {
            d.push(t)?;
        }
        Ok(d)
    }

    fn push(&mut self, t: Term) -> Result<(), DistError> {
        let ok = t.deriv.len() == self.dim
            && match &t.support {
                Support::Delta { point } => point.len() == self.dim,
                Support::Density { origin, generators, lower, upper, density } => {
                    origin.len() == self.dim
                        && generators.iter().all(|g| g.len() == self.dim)
                        && lower.len() == generators.len()
                        && upper.len() == generators.len()
                        && density.nvars() == generators.len()
                }
                Support::Sphere { .. } => self.dim == 3,
                Support::Shell { density, .. } => self.dim == 3 && density.nvars() == 1,
            };
        if !ok {
            return Err(DistError::DimensionMismatch { expected: self.dim, got: t.deriv.len() });
        }
        if t.weight != c(0.0) {
            self.terms.push(t);
        }
        Ok(())
    }

    fn single(dim: usize, support: Support) -> Self {
        Distribution { dim, terms: vec![Term { support, deriv: vec![0; dim], weight: c(1.0) }] }
    }

    /// `δ_point`.
    pub fn delta(point: Vec<f64>) -> Self {
        Self::single(point.len(), Support::Delta { point })
    }

    /// `weight · ∂^α δ_point`, pairing as `weight·(−1)^{|α|} ∂^αφ(point)`.
    pub fn delta_derivative(point: Vec<f64>, alpha: Vec<u32>, weight: Complex64) -> Self {
        let dim = point.len();
        Distribution { dim, terms: vec![Term { support: Support::Delta { point }, deriv: alpha, weight }] }
    }

    /// Parametrized polynomial density; see [`Support::Density`].
    pub fn density(
        origin: Vec<f64>,
        generators: Vec<Vec<f64>>,
        lower: Vec<f64>,
        upper: Vec<f64>,
        density: Poly<f64>,
    ) -> Result<Self, DistError> {
        if lower.iter().zip(&upper).any(|(a, b)| a > b || a.is_nan() || b.is_nan()) {
            return Err(DistError::Unsupported("density bounds must satisfy lower ≤ upper".into()));
        }
        let dim = origin.len();
        Distribution::from_terms(
            dim,
            vec![Term {
                support: Support::Density { origin, generators, lower, upper, density },
                deriv: vec![0; dim],
                weight: c(1.0),
            }],
        )
    }

    /// `value · 1_{[lo, hi]}` on the line; either end may be infinite.
    pub fn interval(lo: f64, hi: f64, value: f64) -> Self {
        let q = Poly::constant(1, value);
        let (origin, g, l, u) = match (lo.is_finite(), hi.is_finite()) {
            (true, true) => (lo, 1.0, 0.0, hi - lo),
            (true, false) => (lo, 1.0, 0.0, f64::INFINITY),
            (false, true) => (hi, -1.0, 0.0, f64::INFINITY),
            (false, false) => (0.0, 1.0, f64::NEG_INFINITY, f64::INFINITY),
        };
        Self::density(vec![origin], vec![vec![g]], vec![l], vec![u], q).expect("valid interval")
    }

    /// `1_{[a, ∞)}`.
    pub fn half_line(a: f64) -> Self {
        Self::interval(a, f64::INFINITY, 1.0)
    }

    /// Constant `value` on the box `Π [lo_i, hi_i]`.
    pub fn box_density(lo: &[f64], hi: &[f64], value: f64) -> Result<Self, DistError> {
        let r = lo.len();
        let gens = (0..r).map(|i| (0..r).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
        let upper = lo.iter().zip(hi).map(|(a, b)| b - a).collect();
        Self::density(lo.to_vec(), gens, vec![0.0; r], upper, Poly::constant(r, value))
    }

    /// Uniform sphere in `ℝ³`.
    pub fn sphere(radius: f64, mass: f64) -> Self {
        Self::single(3, Support::Sphere { radius, mass })
    }

    /// `∫_{inner}^{outer} q(s) σ_s ds` in `ℝ³`.
    pub fn shell(inner: f64, outer: f64, density: Poly<f64>) -> Result<Self, DistError> {
        Distribution::from_terms(
            3,
            vec![Term { support: Support::Shell { inner, outer, density }, deriv: vec![0; 3], weight: c(1.0) }],
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.weight == c(0.0))
    }

    pub fn is_compact(&self) -> bool {
        self.terms.iter().all(Term::is_compact)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Distribution { dim: self.dim, terms }
    }

    pub fn scale(&self, w: Complex64) -> Self {
        let terms = if w == c(0.0) {
            Vec::new()
        } else {
            self.terms.iter().map(|t| Term { weight: t.weight * w, ..t.clone() }).collect()
        };
        Distribution { dim: self.dim, terms }
    }

    /// Distributional derivative `∂^α`.
    pub fn derivative(&self, alpha: &[u32]) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| Term { deriv: t.deriv.iter().zip(alpha).map(|(a, b)| a + b).collect(), ..t.clone() })
            .collect();
        Distribution { dim: self.dim, terms }
    }

    /// `⟨rescale_k D, φ⟩ = ⟨D, φ(·/k)⟩`.
    pub fn rescale(&self, k: f64) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let order: u32 = t.deriv.iter().sum();
                let support = match &t.support {
                    Support::Delta { point } => Support::Delta { point: point.iter().map(|x| x / k).collect() },
                    Support::Density { origin, generators, lower, upper, density } => Support::Density {
                        origin: origin.iter().map(|x| x / k).collect(),
                        generators: generators.iter().map(|g| g.iter().map(|x| x / k).collect()).collect(),
                        lower: lower.clone(),
                        upper: upper.clone(),
                        density: density.clone(),
                    },
                    Support::Sphere { radius, mass } => Support::Sphere { radius: radius / k, mass: *mass },
                    Support::Shell { inner, outer, density } => Support::Shell {
                        inner: inner / k,
                        outer: outer / k,
                        density: density.compose(&[Poly::var(1, 0).scale(&k)]).scale(&k),
                    },
                };
                Term { support, deriv: t.deriv.clone(), weight: t.weight * k.powi(-(order as i32)) }
            })
            .collect();
        Distribution { dim: self.dim, terms }
    }

    /// `⟨L_* D, φ⟩ = ⟨D, φ∘L⟩` for a linear map given by its rows.
    pub fn pushforward(&self, l: &[Vec<f64>]) -> Result<Self, DistError> {
        if l.iter().any(|row| row.len() != self.dim) {
            return Err(DistError::DimensionMismatch { expected: self.dim, got: l.first().map_or(0, Vec::len) });
        }
        let target = l.len();
        let mut out = Distribution::zero(target);
        for t in &self.terms {
            let base = push_support(&t.support, l, self.dim)?;
            // chain rule: ∂^α(φ∘L) = Π_i (Σ_j L_ji ∂_j)^{α_i} φ ∘ L
            let mut chain = Poly::one(target);
            for (i, &a) in t.deriv.iter().enumerate() {
                let dir = Poly::from_terms(
                    target,
                    (0..target).map(|j| {
                        let mut e = vec![0; target];
                        e[j] = 1;
                        (e, l[j][i])
                    }),
                );
                chain = &chain * &dir.pow(a);
            }
            for (beta, coef) in chain.terms() {
                for (support, w) in &base {
                    out.push(Term { support: support.clone(), deriv: beta.clone(), weight: t.weight * coef * w })?;
                }
            }
        }
        Ok(out)
    }

    /// Convolution `D ⋆ B`; at least one operand must have compact support.
    pub fn convolve(&self, b: &Self) -> Result<Self, DistError> {
        if self.dim != b.dim {
            return Err(DistError::DimensionMismatch { expected: self.dim, got: b.dim });
        }
        if !self.is_compact() && !b.is_compact() {
            return Err(DistError::UnboundedSupport);
        }
        let mut out = Distribution::zero(self.dim);
        for t in &self.terms {
            for u in &b.terms {
                let support = convolve_support(&t.support, &u.support)?;
                let deriv = t.deriv.iter().zip(&u.deriv).map(|(a, b)| a + b).collect();
                out.push(Term { support, deriv, weight: t.weight * u.weight })?;
            }
        }
        Ok(out)
    }

    /// Rewrites derivatives of one-dimensional interval densities by
    /// integration by parts: `∂(q·1_{[x_0,x_1]}) = q′·1 + q(x_0)δ_{x_0} − q(x_1)δ_{x_1}`.
    pub fn expand_boundary(&self) -> Self {
        if self.dim != 1 {
            return self.clone();
        }
        let mut out = Distribution::zero(1);
        for t in &self.terms {
            expand_term(t, &mut out.terms);
        }
        out
    }

    pub fn pair<I: Integrand>(&self, f: &I) -> Result<Complex64, DistError> {
        self.pair_with(f, &Quad::default(), Exec::default())
    }

    /// Pairing `⟨D, f⟩ = Σ weight·(−1)^{|α|} ⟨support, ∂^α f⟩`.
    pub fn pair_with<I: Integrand>(&self, f: &I, quad: &Quad, exec: Exec) -> Result<Complex64, DistError> {
        if f.dim() != self.dim {
            return Err(DistError::DimensionMismatch { expected: self.dim, got: f.dim() });
        }
        let mut derivs: BTreeMap<&[u32], I> = BTreeMap::new();
        for t in &self.terms {
            derivs.entry(&t.deriv).or_insert_with(|| f.derivative(&t.deriv));
        }
        let values = par::map(exec, &self.terms, |t| -> Result<Complex64, DistError> {
            let g = &derivs[t.deriv.as_slice()];
            let sign = if t.deriv.iter().sum::<u32>() % 2 == 1 { -1.0 } else { 1.0 };
            Ok(t.weight * sign * pair_support(&t.support, g, quad)?)
        });
        let values: Vec<Complex64> = values.into_iter().collect::<Result<_, _>>()?;
        Ok(par::sum_c64(values))
    }

    /// `⟨D, e^{i⟨·, X⟩}⟩`; requires compact support.
    pub fn fourier_pair(&self, x: &[f64]) -> Result<Complex64, DistError> {
        if !self.is_compact() {
            return Err(DistError::UnboundedSupport);
        }
        self.pair(&PlaneWave { freq: x.to_vec(), coeff: c(1.0) })
    }

    /// Structured, serializable description.
    pub fn to_document(&self) -> DistributionDoc {
        let poly_doc = |p: &Poly<f64>| p.terms().map(|(e, v)| (e.clone(), *v)).collect();
        let bound = |v: &[f64]| v.iter().map(|x| x.is_finite().then_some(*x)).collect();
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let support = match &t.support {
                    Support::Delta { point } => SupportDoc::Delta { point: point.clone() },
                    Support::Density { origin, generators, lower, upper, density } => SupportDoc::Density {
                        origin: origin.clone(),
                        generators: generators.clone(),
                        lower: bound(lower),
                        upper: bound(upper),
                        density: poly_doc(density),
                    },
                    Support::Sphere { radius, mass } => SupportDoc::Sphere { radius: *radius, mass: *mass },
                    Support::Shell { inner, outer, density } => {
                        SupportDoc::Shell { inner: *inner, outer: *outer, density: poly_doc(density) }
                    }
                };
                TermDoc { support, deriv: t.deriv.clone(), weight: [t.weight.re, t.weight.im] }
            })
            .collect();
        DistributionDoc { dim: self.dim, terms }
    }
}

/// Serialized form of a [`Distribution`]. Infinite bounds are `null`;
/// polynomials are lists of `[exponent, coefficient]`.
#[derive(Clone, Debug, Serialize)]
pub struct DistributionDoc {
    pub dim: usize,
    pub terms: Vec<TermDoc>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TermDoc {
    #[serde(flatten)]
    pub support: SupportDoc,
    pub deriv: Vec<u32>,
    pub weight: [f64; 2],
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SupportDoc {
    Delta {
        point: Vec<f64>,
    },
    Density {
        origin: Vec<f64>,
        generators: Vec<Vec<f64>>,
        lower: Vec<Option<f64>>,
        upper: Vec<Option<f64>>,
        density: Vec<(Vec<u32>, f64)>,
    },
    Sphere {
        radius: f64,
        mass: f64,
    },
    Shell {
        inner: f64,
        outer: f64,
        density: Vec<(Vec<u32>, f64)>,
    },
}

fn is_identity(l: &[Vec<f64>]) -> bool {
    l.iter().enumerate().all(|(i, row)| row.iter().enumerate().all(|(j, &v)| v == if i == j { 1.0 } else { 0.0 }))
}

/// Image of a support under `L`, as a list of (support, factor).
fn push_support(s: &Support, l: &[Vec<f64>], src: usize) -> Result<Vec<(Support, f64)>, DistError> {
    let target = l.len();
    match s {
        Support::Delta { point } => Ok(vec![(Support::Delta { point: mat_vec(l, point) }, 1.0)]),
        Support::Density { origin, generators, lower, upper, density } => {
            let mut gens: Vec<Vec<f64>> = generators.iter().map(|g| mat_vec(l, g)).collect();
            let (mut lo, mut hi, mut q) = (lower.clone(), upper.clone(), density.clone());
            let mut i = 0;
            while i < gens.len() {
                if gens[i].iter().all(|&x| x == 0.0) {
                    if !(lo[i].is_finite() && hi[i].is_finite()) {
                        return Err(DistError::Unsupported("projection with an infinite fiber".into()));
                    }
                    q = integrate_out(&q, i, lo[i], hi[i]);
                    gens.remove(i);
                    lo.remove(i);
                    hi.remove(i);
                } else {
                    i += 1;
                }
            }
            Ok(vec![(Support::Density { origin: mat_vec(l, origin), generators: gens, lower: lo, upper: hi, density: q }, 1.0)])
        }
        Support::Sphere { radius, mass } => {
            if target == 3 && src == 3 && is_identity(l) {
                Ok(vec![(s.clone(), 1.0)])
            } else if target == 1 && l[0] == [0.0, 0.0, 1.0] {
                if *radius == 0.0 {
                    return Ok(vec![(Support::Delta { point: vec![0.0] }, *mass)]);
                }
                let q = Poly::constant(1, mass / (2.0 * radius));
                Ok(vec![(
                    Support::Density {
                        origin: vec![-radius],
                        generators: vec![vec![1.0]],
                        lower: vec![0.0],
                        upper: vec![2.0 * radius],
                        density: q,
                    },
                    1.0,
                )])
            } else {
                Err(DistError::Unsupported("sphere pushforward other than identity or axis projection".into()))
            }
        }
        Support::Shell { .. } => {
            if target == 3 && is_identity(l) {
                Ok(vec![(s.clone(), 1.0)])
            } else {
                Err(DistError::Unsupported("shell pushforward other than identity".into()))
            }
        }
    }
}

fn convolve_support(a: &Support, b: &Support) -> Result<Support, DistError> {
    use Support::*;
    let add = |x: &[f64], y: &[f64]| -> Vec<f64> { x.iter().zip(y).map(|(p, q)| p + q).collect() };
    match (a, b) {
        (Delta { point: p }, Delta { point: q }) => Ok(Delta { point: add(p, q) }),
        (Delta { point }, Density { origin, generators, lower, upper, density })
        | (Density { origin, generators, lower, upper, density }, Delta { point }) => Ok(Density {
            origin: add(origin, point),
            generators: generators.clone(),
            lower: lower.clone(),
            upper: upper.clone(),
            density: density.clone(),
        }),
        (
            Density { origin: o1, generators: g1, lower: l1, upper: u1, density: q1 },
            Density { origin: o2, generators: g2, lower: l2, upper: u2, density: q2 },
        ) => {
            let q = &pad_vars(q1, g2.len(), false) * &pad_vars(q2, g1.len(), true);
            Ok(Density {
                origin: add(o1, o2),
                generators: g1.iter().chain(g2).cloned().collect(),
                lower: l1.iter().chain(l2).copied().collect(),
                upper: u1.iter().chain(u2).copied().collect(),
                density: q,
            })
        }
        (Delta { point }, s @ (Sphere { .. } | Shell { .. })) | (s @ (Sphere { .. } | Shell { .. }), Delta { point })
            if point.iter().all(|&x| x == 0.0) =>
        {
            Ok(s.clone())
        }
        _ => Err(DistError::Unsupported("convolution of these term types".into())),
    }
}

fn expand_term(t: &Term, out: &mut Vec<Term>) {
    let n = t.deriv[0];
    let Support::Density { origin, generators, lower, upper, density } = &t.support else {
        out.push(t.clone());
        return;
    };
    if n == 0 || generators.len() != 1 {
        out.push(t.clone());
        return;
    }
    let (a, w, lo, hi) = (origin[0], generators[0][0], lower[0], upper[0]);
    let rest = vec![n - 1];
    let mut emit = |support: Support, weight: Complex64, deriv: Vec<u32>| {
        if weight != c(0.0) {
            expand_term(&Term { support, deriv, weight }, out);
        }
    };
    if lo.is_finite() {
        let v = density.eval_f64(&[lo]) / w;
        emit(Support::Delta { point: vec![a + w * lo] }, t.weight * v, rest.clone());
    }
    if hi.is_finite() {
        let v = density.eval_f64(&[hi]) / w;
        emit(Support::Delta { point: vec![a + w * hi] }, -t.weight * v, rest.clone());
    }
    let dq = density.derivative(0).scale(&(1.0 / w));
    if !dq.is_zero() {
        emit(
            Support::Density {
                origin: origin.clone(),
                generators: generators.clone(),
                lower: lower.clone(),
                upper: upper.clone(),
                density: dq,
            },
            t.weight,
            rest,
        );
    }
}

fn pair_support<I: Integrand>(s: &Support, f: &I, quad: &Quad) -> Result<Complex64, DistError> {
    match s {
        Support::Delta { point } => Ok(f.value(point)),
        Support::Density { origin, generators, lower, upper, density } => {
            density_pair(origin, generators, lower, upper, density, f, quad)
        }
        Support::Sphere { radius, mass } => Ok(sphere_pair(*radius, f, quad)? * *mass),
        Support::Shell { inner, outer, density } => {
            let err = std::cell::Cell::new(None);
            let v = integrate(
                |s| match sphere_pair(s, f, quad) {
                    Ok(v) => v * density.eval_f64(&[s]),
                    Err(e) => {
                        err.set(Some(e));
                        c(0.0)
                    }
                },
                *inner,
                *outer,
                quad,
            )?;
            match err.take() {
                Some(e) => Err(e),
                None => Ok(v),
            }
        }
    }
}

/// Unit-mass sphere average of `f` at radius `rho`.
fn sphere_pair<I: Integrand>(rho: f64, f: &I, quad: &Quad) -> Result<Complex64, DistError> {
    if rho == 0.0 {
        return Ok(f.value(&[0.0, 0.0, 0.0]));
    }
    let err = std::cell::Cell::new(None);
    let v = integrate(
        |z| {
            let r = rho * (1.0 - z * z).max(0.0).sqrt();
            match integrate_periodic(|psi| f.value(&[r * psi.cos(), r * psi.sin(), rho * z]), quad) {
                Ok(v) => v,
                Err(e) => {
                    err.set(Some(e));
                    c(0.0)
                }
            }
        },
        -1.0,
        1.0,
        quad,
    )?;
    match err.take() {
        Some(e) => Err(e),
        None => Ok(v / (4.0 * std::f64::consts::PI)),
    }
}

fn density_pair<I: Integrand>(
    origin: &[f64],
    gens: &[Vec<f64>],
    lower: &[f64],
    upper: &[f64],
    q: &Poly<f64>,
    f: &I,
    quad: &Quad,
) -> Result<Complex64, DistError> {
    let m = gens.len();
    let (mut lo, mut hi) = (lower.to_vec(), upper.to_vec());
    let infinite: Vec<usize> = (0..m).filter(|&i| !(lo[i].is_finite() && hi[i].is_finite())).collect();
    if !infinite.is_empty() {
        let r = origin.len();
        let mut shift = norm(origin);
        for i in (0..m).filter(|i| !infinite.contains(i)) {
            shift += norm(&gens[i]) * lo[i].abs().max(hi[i].abs());
        }
        let w = DMatrix::from_fn(r, infinite.len(), |a, b| gens[infinite[b]][a]);
        let sigma = if infinite.len() > r {
            0.0
        } else {
            w.singular_values().iter().copied().fold(f64::INFINITY, f64::min)
        };
        if sigma <= 1e-12 {
            return Err(DistError::Unsupported("unbounded density with degenerate generators".into()));
        }
        let degree = q.degree().unwrap_or(0);
        let inflate = (1.0 / sigma).max(1.0).powi((degree + m as u32 + 1) as i32);
        let tol = quad.abs_tol * 1e-3 / (q.l1_norm().max(1.0) * inflate);
        let radius = f.tail_radius(tol, degree + m as u32 + 2).ok_or(DistError::UnboundedSupport)?;
        let s_max = (radius + shift) / sigma;
        for &i in &infinite {
            lo[i] = lo[i].max(-s_max);
            hi[i] = hi[i].min(s_max);
            if lo[i] >= hi[i] {
                return Ok(c(0.0));
            }
        }
    }
    let r = origin.len();
    integrate_box(
        |s| {
            let mut x = origin.to_vec();
            for (si, g) in s.iter().zip(gens) {
                for a in 0..r {
                    x[a] += si * g[a];
                }
            }
            f.value(&x) * q.eval_f64(s)
        },
        &lo,
        &hi,
        quad,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist_calc::TestFunction;

    fn phi() -> TestFunction {
        TestFunction::univariate(&[1.0, 0.4, -0.3], 0.2, 0.9).unwrap()
    }

    #[test]
    fn spec_pairings() {
        let g = TestFunction::gaussian(1);
        assert!((Distribution::delta(vec![0.0]).pair(&g).unwrap().re - 1.0).abs() < 1e-15);
        let h = Distribution::half_line(0.0).pair(&g).unwrap();
        assert!((h.re - std::f64::consts::PI.sqrt() / 2.0).abs() < 1e-14);
        let f = phi();
        let d = Distribution::delta_derivative(vec![0.3], vec![1], c(1.0)).pair(&f).unwrap();
        assert!((d.re + f.derivative(&[1]).eval(&[0.3])).abs() < 1e-15);
    }

    #[test]
    fn rescale_examples() {
        let d = Distribution::delta(vec![2.0]).rescale(2.0);
        assert_eq!(d, Distribution::delta(vec![1.0]));
        let s = Distribution::sphere(2.0, 2.0).rescale(2.0);
        assert_eq!(s, Distribution::sphere(1.0, 2.0));
        let f = phi();
        let lhs = Distribution::half_line(0.0).rescale(3.0).pair(&f).unwrap();
        let rhs = Distribution::half_line(0.0).pair(&f).unwrap() * 3.0;
        assert!((lhs - rhs).norm() < 1e-13);
    }

    #[test]
    fn pushforward_examples() {
        let d = Distribution::delta(vec![1.0, 2.0]).pushforward(&[vec![1.0, 0.0]]).unwrap();
        assert_eq!(d, Distribution::delta(vec![1.0]));
        let s = Distribution::sphere(1.0, 1.0).pushforward(&[vec![0.0, 0.0, 1.0]]).unwrap();
        let f = phi();
        let want = Distribution::interval(-1.0, 1.0, 0.5).pair(&f).unwrap();
        assert!((s.pair(&f).unwrap() - want).norm() < 1e-14);
        let b = Distribution::box_density(&[0.0, 0.0], &[1.0, 1.0], 1.0).unwrap();
        let p = b.pushforward(&[vec![1.0, 0.0]]).unwrap();
        let want = Distribution::interval(0.0, 1.0, 1.0).pair(&f).unwrap();
        assert!((p.pair(&f).unwrap() - want).norm() < 1e-14);
    }

    #[test]
    fn convolution_examples() {
        let f = phi();
        let ab = Distribution::delta(vec![0.5]).convolve(&Distribution::delta(vec![1.25])).unwrap();
        assert_eq!(ab, Distribution::delta(vec![1.75]));
        let b = Distribution::interval(-1.0, 1.0, 0.5);
        let two = Distribution::delta(vec![-1.0]).add(&Distribution::delta(vec![1.0]));
        let lhs = two.convolve(&b).unwrap().pair(&f).unwrap();
        let rhs = Distribution::interval(-2.0, 2.0, 0.5).pair(&f).unwrap();
        assert!((lhs - rhs).norm() < 1e-14);
        // a half-line against a compact interval is allowed, two half-lines are not
        assert!(Distribution::half_line(0.0).convolve(&b).is_ok());
        assert!(matches!(
            Distribution::half_line(0.0).convolve(&Distribution::half_line(1.0)),
            Err(DistError::UnboundedSupport)
        ));
    }

    #[test]
    fn half_line_convolved_with_interval() {
        // 1_{[0,∞)} ⋆ ½1_{[−1,1]} has density ½(x+1) on [−1,1] and 1 beyond
        let f = phi();
        let conv = Distribution::half_line(0.0).convolve(&Distribution::interval(-1.0, 1.0, 0.5)).unwrap();
        let ramp = Distribution::density(
            vec![-1.0],
            vec![vec![1.0]],
            vec![0.0],
            vec![2.0],
            Poly::from_terms(1, [(vec![1], 0.5)]),
        )
        .unwrap();
        let want = ramp.add(&Distribution::half_line(1.0));
        assert!((conv.pair(&f).unwrap() - want.pair(&f).unwrap()).norm() < 1e-13);
    }

    #[test]
    fn boundary_expansion_matches_pairing() {
        let f = phi();
        let q = Poly::from_terms(1, [(vec![0], 1.0), (vec![1], -0.5), (vec![2], 0.25)]);
        let d = Distribution::density(vec![0.3], vec![vec![-0.7]], vec![0.0], vec![2.0], q).unwrap();
        for n in 0..4 {
            let dn = d.derivative(&[n]);
            let e = dn.expand_boundary();
            assert!((dn.pair(&f).unwrap() - e.pair(&f).unwrap()).norm() < 1e-13, "order {n}");
        }
        let h = Distribution::half_line(0.5).derivative(&[2]).expand_boundary();
        assert_eq!(h.terms().len(), 1);
        assert!((h.pair(&f).unwrap().re + f.derivative(&[1]).eval(&[0.5])).abs() < 1e-15);
    }

    #[test]
    fn sphere_pairing_and_fourier() {
        let s = Distribution::sphere(1.5, 2.0);
        assert!((s.fourier_pair(&[0.0, 0.0, 0.0]).unwrap().re - 2.0).abs() < 1e-14);
        let t = 0.8;
        let got = s.fourier_pair(&[0.0, 0.0, t]).unwrap();
        let want = 2.0 * (1.5 * t).sin() / (1.5 * t);
        assert!((got.re - want).abs() < 1e-13 && got.im.abs() < 1e-13);
        // a frequency off the axis gives the same value by rotation invariance
        let off = s.fourier_pair(&[0.48, 0.0, 0.64]).unwrap();
        assert!((off.re - want).abs() < 1e-13);
        let b = Distribution::interval(-1.0, 1.0, 0.5).fourier_pair(&[t]).unwrap();
        assert!((b.re - t.sin() / t).abs() < 1e-14);
        assert!(matches!(Distribution::half_line(0.0).fourier_pair(&[1.0]), Err(DistError::UnboundedSupport)));
    }

    #[test]
    fn shell_total_mass() {
        let d = Distribution::shell(0.0, 2.0, Poly::from_terms(1, [(vec![1], 0.5)])).unwrap();
        assert!((d.fourier_pair(&[0.0, 0.0, 0.0]).unwrap().re - 1.0).abs() < 1e-13);
        let r = d.rescale(2.0);
        let f = TestFunction::gaussian(3);
        let lhs = r.pair(&f).unwrap();
        let rhs = d.pair(&f.dilate(2.0)).unwrap();
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn two_dimensional_cone() {
        // ∫_{ℝ₊²} exp(−|a + 2s|²) ds with a = 0 is (1/4)(√π/2)²
        let d = Distribution::density(
            vec![0.0, 0.0],
            vec![vec![2.0, 0.0], vec![0.0, 2.0]],
            vec![0.0, 0.0],
            vec![f64::INFINITY, f64::INFINITY],
            Poly::one(2),
        )
        .unwrap();
        let v = d.pair(&TestFunction::gaussian(2)).unwrap();
        assert!((v.re - std::f64::consts::PI / 16.0).abs() < 1e-14);
    }

    #[test]
    fn serializes() {
        let d = Distribution::half_line(1.0).add(&Distribution::delta(vec![0.0]));
        let doc = d.to_document();
        assert_eq!(doc.terms.len(), 2);
        assert!(matches!(doc.terms[0].support, SupportDoc::Density { .. }));
    }
}
