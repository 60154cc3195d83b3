//! Catalog of `(M, L)` models: exact multiplicities `m(λ,k)`, the sums
//! `Θ_k = Σ_λ m(λ,k)·rescale_k(β_λ)`, Duistermaat–Heckman base distributions
//! and `Â` germs.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use num_integer::Integer;
use num_traits::ToPrimitive;
use thiserror::Error;

use crate::dist_calc::{DistError, Distribution, Integrand, TestFunction};
use crate::exact_series::{germ_taylor, i_pow, crational_to_c64, Germ, RootOfUnity, SeriesError};
use crate::group_orbits::{orbit_measure, GroupData, GroupError, IrrepLabel};
use crate::par::{self, Exec};
use crate::poly::Poly;
use crate::quasipoly::{positive_functional, vector_partition, Polyhedron, PiecewiseQP, QpError, ENUMERATION_LIMIT};
use crate::exact_series::Rational;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("unknown model `{0}`")]
    UnknownModel(String),
    #[error("bad model parameters: {0}")]
    BadParameters(String),
    #[error("odd weight {0}: only even weights satisfy the spin condition")]
    OddWeight(i64),
    #[error("unsupported for this model: {0}")]
    Unsupported(String),
    #[error("label has rank {got}, model has rank {expected}")]
    RankMismatch { expected: usize, got: usize },
    #[error("k must be positive, got {0}")]
    BadLevel(i64),
    #[error("multiplicity at ({lambda:?}, {k}) is not an integer")]
    NonIntegral { lambda: Vec<i64>, k: i64 },
    #[error("test function does not decay; no truncation certificate")]
    NoCertificate,
    #[error("enumeration of {0} lattice points exceeds the limit")]
    TooManyPoints(u128),
    #[error(transparent)]
    Dist(#[from] DistError),
    #[error(transparent)]
    QuasiPoly(#[from] QpError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Group(#[from] GroupError),
}

#[derive(Clone, Debug, PartialEq)]
pub enum ModelKind {
    /// `T*S¹`: every weight once.
    TStarS1,
    /// `ℂ` with weight `w` and moment shift `a`.
    ComplexLine { w: i64, a: i64 },
    /// `ℂⁿ` with weights `W` in an open half-space and shift `a`.
    ComplexSpace { weights: Vec<Vec<i64>>, a: Vec<i64> },
    /// The coadjoint orbit of SU(2) through `ρ`.
    Su2Orbit,
    /// `(G/T)²` for SU(2), i.e. `V_k ⊗ V_k` at level `k`.
    Su2FlagSquare,
    /// A torus model given only by its multiplicity function.
    Custom { name: String, pqp: PiecewiseQP, d: usize },
}

/// Value of `Θ_k` (or a twisted sum) with its truncation certificate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThetaValue {
    pub value: Complex64,
    /// Atoms with `|λ/k| > radius` were dropped.
    pub radius: f64,
    /// Bound on the modulus of the dropped part.
    pub tail_bound: f64,
    pub atoms: usize,
}

/// Target size of the dropped tail.
pub const TAIL_TOLERANCE: f64 = 1e-18;

#[derive(Clone, Debug, PartialEq)]
pub struct Model {
    kind: ModelKind,
    defects: BTreeMap<(Vec<i64>, i64), i64>,
}

impl Model {
    pub fn new(kind: ModelKind) -> Result<Self, ModelError> {
        match &kind {
            ModelKind::ComplexLine { w, .. } => check_weight(*w)?,
            ModelKind::ComplexSpace { weights, a } => {
                if weights.is_empty() {
                    return Err(ModelError::BadParameters("complex-space needs at least one weight".into()));
                }
                for w in weights {
                    if w.len() != a.len() {
                        return Err(ModelError::RankMismatch { expected: a.len(), got: w.len() });
                    }
                    for &x in w {
                        if x % 2 != 0 {
                            return Err(ModelError::OddWeight(x));
                        }
                    }
                }
                positive_functional(weights)?;
            }
            ModelKind::Custom { pqp, .. } if pqp.rank() == 0 => {
                return Err(ModelError::BadParameters("custom model of rank 0".into()));
            }
            _ => {}
        }
        Ok(Model { kind, defects: BTreeMap::new() })
    }

    pub fn t_star_s1() -> Self {
        Model { kind: ModelKind::TStarS1, defects: BTreeMap::new() }
    }

    pub fn complex_line(w: i64, a: i64) -> Result<Self, ModelError> {
        Model::new(ModelKind::ComplexLine { w, a })
    }

    pub fn complex_space(weights: Vec<Vec<i64>>, a: Vec<i64>) -> Result<Self, ModelError> {
        Model::new(ModelKind::ComplexSpace { weights, a })
    }

    pub fn su2_orbit() -> Self {
        Model { kind: ModelKind::Su2Orbit, defects: BTreeMap::new() }
    }

    pub fn su2_flag_square() -> Self {
        Model { kind: ModelKind::Su2FlagSquare, defects: BTreeMap::new() }
    }

    pub fn custom(name: &str, pqp: PiecewiseQP, d: usize) -> Result<Self, ModelError> {
        Model::new(ModelKind::Custom { name: name.to_string(), pqp, d })
    }

    /// A copy with `m(λ, k)` shifted by `delta` at one point.
    pub fn with_defect(&self, lambda: &[i64], k: i64, delta: i64) -> Result<Self, ModelError> {
        self.check_label(lambda, k)?;
        let mut out = self.clone();
        *out.defects.entry((lambda.to_vec(), k)).or_insert(0) += delta;
        Ok(out)
    }

    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }

    pub fn has_defects(&self) -> bool {
        self.defects.values().any(|&d| d != 0)
    }

    pub fn name(&self) -> String {
        match &self.kind {
            ModelKind::TStarS1 => "t-star-s1".into(),
            ModelKind::ComplexLine { w, a } => format!("complex-line({w},{a})"),
            ModelKind::ComplexSpace { weights, a } => {
                let ws: Vec<String> = weights.iter().map(|w| format!("({})", join(w))).collect();
                format!("complex-space({};({}))", ws.join(","), join(a))
            }
            ModelKind::Su2Orbit => "su2-orbit".into(),
            ModelKind::Su2FlagSquare => "su2-flag-square".into(),
            ModelKind::Custom { name, .. } => name.clone(),
        }
    }

    pub fn group(&self) -> GroupData {
        match &self.kind {
            ModelKind::TStarS1 | ModelKind::ComplexLine { .. } => GroupData::Torus { rank: 1 },
            ModelKind::ComplexSpace { a, .. } => GroupData::Torus { rank: a.len() },
            ModelKind::Custom { pqp, .. } => GroupData::Torus { rank: pqp.rank() },
            ModelKind::Su2Orbit | ModelKind::Su2FlagSquare => GroupData::Su2,
        }
    }

    pub fn is_torus(&self) -> bool {
        matches!(self.group(), GroupData::Torus { .. })
    }

    /// Length of a label `λ`.
    pub fn label_rank(&self) -> usize {
        self.group().rank()
    }

    /// `d = dim M / 2`.
    pub fn half_dim(&self) -> usize {
        match &self.kind {
            ModelKind::TStarS1 | ModelKind::ComplexLine { .. } | ModelKind::Su2Orbit => 1,
            ModelKind::ComplexSpace { weights, .. } => weights.len(),
            ModelKind::Su2FlagSquare => 2,
            ModelKind::Custom { d, .. } => *d,
        }
    }

    /// `r = dim(G/T) / 2`.
    pub fn r(&self) -> usize {
        self.group().half_root_count()
    }

    /// Whether `m(·, k)` has finite support for every `k`.
    pub fn is_compact(&self) -> bool {
        matches!(self.kind, ModelKind::Su2Orbit | ModelKind::Su2FlagSquare)
    }

    /// Whether restriction to the maximal torus is available.
    pub fn has_restriction(&self) -> bool {
        self.is_compact()
    }

    /// Period in `k` of the expansion coefficients.
    pub fn period(&self) -> u64 {
        1
    }

    fn check_label(&self, lambda: &[i64], k: i64) -> Result<(), ModelError> {
        if k < 1 {
            return Err(ModelError::BadLevel(k));
        }
        if lambda.len() != self.label_rank() {
            return Err(ModelError::RankMismatch { expected: self.label_rank(), got: lambda.len() });
        }
        Ok(())
    }

    /// Exact `m(λ, k)`.
    pub fn multiplicity(&self, lambda: &[i64], k: i64) -> Result<i64, ModelError> {
        self.check_label(lambda, k)?;
        let base = match &self.kind {
            ModelKind::TStarS1 => 1,
            ModelKind::ComplexLine { w, a } => {
                let t = lambda[0] - k * a - w / 2;
                i64::from(t >= 0 && t % w == 0)
            }
            ModelKind::ComplexSpace { weights, a } => vector_partition(weights, a, lambda, k)? as i64,
            ModelKind::Su2Orbit => i64::from(lambda[0] == k),
            ModelKind::Su2FlagSquare => {
                let l = lambda[0];
                i64::from((1..=2 * k).contains(&l) && l.is_odd())
            }
            ModelKind::Custom { pqp, .. } => {
                let v = pqp.eval(lambda, k);
                if !v.is_integer() {
                    return Err(ModelError::NonIntegral { lambda: lambda.to_vec(), k });
                }
                v.to_integer().to_i64().ok_or(ModelError::NonIntegral { lambda: lambda.to_vec(), k })?
            }
        };
        Ok(base + self.defects.get(&(lambda.to_vec(), k)).copied().unwrap_or(0))
    }

    /// `(C, p)` with `|m(λ,k)| ≤ C·(1 + |λ| + k)^p`.
    pub fn multiplicity_bound(&self) -> (f64, u32) {
        let (c, p) = match &self.kind {
            ModelKind::TStarS1 | ModelKind::ComplexLine { .. } | ModelKind::Su2Orbit | ModelKind::Su2FlagSquare => {
                (1.0, 0)
            }
            ModelKind::ComplexSpace { weights, a } => {
                let n = weights.len() as u32;
                let xi = positive_functional(weights).expect("validated weights");
                let xi1: f64 = xi.iter().map(|x| x.unsigned_abs() as f64).sum();
                let amax = a.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0) as f64;
                let wsum: f64 =
                    weights.iter().map(|w| w.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0) as f64 / 2.0).sum();
                ((1.0 + xi1 * (1.0 + amax + wsum)).powi(n as i32 - 1), n - 1)
            }
            ModelKind::Custom { pqp, .. } => {
                let mut c = 0.0;
                let mut p = 0;
                for piece in pqp.pieces() {
                    let worst = piece
                        .qp
                        .classes()
                        .map(|(_, poly)| poly.map_coeffs(|x: &Rational| x.to_f64().unwrap_or(f64::INFINITY)).l1_norm())
                        .fold(0.0, f64::max);
                    c += piece.coeff.unsigned_abs() as f64 * worst;
                    p = p.max(piece.qp.degree());
                }
                (c, p)
            }
        };
        let defect = self.defects.values().map(|d| d.unsigned_abs()).max().unwrap_or(0) as f64;
        (c + defect, p)
    }

    /// Closed moment image containing every `λ/k` with `m(λ,k) ≠ 0`, when
    /// it is a polyhedron this crate can describe.
    pub fn moment_image(&self) -> Option<Polyhedron> {
        let r = |n: i64| Rational::from_integer(n.into());
        match &self.kind {
            ModelKind::TStarS1 => Some(Polyhedron::whole(1)),
            ModelKind::ComplexLine { a, .. } => Some(Polyhedron::interval(Some(r(*a)), None)),
            ModelKind::Su2Orbit => Some(Polyhedron::interval(Some(r(1)), Some(r(1)))),
            ModelKind::Su2FlagSquare => Some(Polyhedron::interval(Some(r(0)), Some(r(2)))),
            ModelKind::ComplexSpace { weights, a } if weights.len() == a.len() => cone_image(weights, a),
            _ => None,
        }
    }

    /// The `Â` germ of a torus model.
    pub fn germ(&self) -> Option<Germ> {
        match &self.kind {
            ModelKind::TStarS1 => Some(Germ::One { nvars: 1 }),
            ModelKind::ComplexLine { w, .. } => Some(Germ::XOverSin { weights: vec![vec![*w]] }),
            ModelKind::ComplexSpace { weights, .. } => Some(Germ::XOverSin { weights: weights.clone() }),
            _ => None,
        }
    }

    /// The germ of `j^{1/2}_g` along `t`.
    pub fn duflo_germ(&self) -> Germ {
        match self.group() {
            GroupData::Torus { rank } => Germ::JHalfTorus { rank },
            GroupData::Su2 => Germ::JHalfSu2,
        }
    }

    /// `DH(1)`, on `t*` for tori and on `su(2)* ≅ ℝ³` for SU(2).
    pub fn dh_base(&self) -> Result<Distribution, ModelError> {
        match &self.kind {
            ModelKind::TStarS1 => Ok(Distribution::interval(f64::NEG_INFINITY, f64::INFINITY, 1.0)),
            ModelKind::ComplexLine { w, a } => Ok(Distribution::interval(*a as f64, f64::INFINITY, 1.0 / *w as f64)),
            ModelKind::ComplexSpace { weights, a } => {
                let n = weights.len();
                Ok(Distribution::density(
                    a.iter().map(|&x| x as f64).collect(),
                    weights.iter().map(|w| w.iter().map(|&x| x as f64).collect()).collect(),
                    vec![0.0; n],
                    vec![f64::INFINITY; n],
                    Poly::constant(n, 1.0),
                )?)
            }
            ModelKind::Su2Orbit => Ok(Distribution::sphere(1.0, 1.0)),
            ModelKind::Su2FlagSquare => {
                Ok(Distribution::shell(0.0, 2.0, Poly::var(1, 0).scale(&0.5))?)
            }
            ModelKind::Custom { .. } => Err(ModelError::Unsupported("no DH data for a custom model".into())),
        }
    }

    /// `⟨DH(Â_n), φ⟩ = ⟨DH(1), g_n(−i∂)φ⟩` with `g_n` the degree-`n` part of `Â`.
    pub fn dh_pair(&self, n: u32, phi: &TestFunction) -> Result<Complex64, ModelError> {
        let base = self.dh_base()?;
        let Some(germ) = self.germ() else {
            if n == 0 {
                return Ok(base.pair(phi)?);
            }
            return Err(ModelError::Unsupported(format!("order {n} of the Â expansion")));
        };
        let series = germ_taylor(&germ, n)?;
        let mut acc = Vec::new();
        for (alpha, coef) in series.degree_part(n).terms() {
            let c = crational_to_c64(&i_pow(3 * n)) * coef.to_f64().unwrap_or(f64::NAN);
            acc.push(c * base.pair(&phi.derivative(alpha))?);
        }
        Ok(par::sum_c64(acc))
    }

    /// `Θ_k = Σ_λ m(λ,k)·rescale_k(β_λ)` as a finite distribution (compact models).
    pub fn theta_distribution(&self, k: i64) -> Result<Distribution, ModelError> {
        if !self.is_compact() {
            return Err(ModelError::Unsupported("Θ_k of a noncompact model is an infinite sum".into()));
        }
        let g = self.group();
        let mut out = Distribution::zero(g.coadjoint_dim());
        for (lam, m) in self.compact_support(k)? {
            let beta = orbit_measure(&g, &IrrepLabel::Su2(lam[0]))?;
            out = out.add(&beta.rescale(k as f64).scale(Complex64::new(m as f64, 0.0)));
        }
        Ok(out)
    }

    /// Nonzero `(λ, m(λ,k))` of a compact model.
    pub fn compact_support(&self, k: i64) -> Result<Vec<(Vec<i64>, i64)>, ModelError> {
        if !self.is_compact() {
            return Err(ModelError::Unsupported("noncompact model".into()));
        }
        if k < 1 {
            return Err(ModelError::BadLevel(k));
        }
        let mut out = Vec::new();
        for l in 1..=2 * k {
            let m = self.multiplicity(&[l], k)?;
            if m != 0 {
                out.push((vec![l], m));
            }
        }
        for ((lam, kk), &d) in &self.defects {
            if *kk == k && !(1..=2 * k).contains(&lam[0]) && d != 0 {
                out.push((lam.clone(), d));
            }
        }
        Ok(out)
    }

    /// `⟨Θ_k, φ⟩` with a tail certificate.
    pub fn theta_pair<I: Integrand>(&self, k: i64, phi: &I) -> Result<ThetaValue, ModelError> {
        self.theta_pair_with(k, phi, Exec::default())
    }

    pub fn theta_pair_with<I: Integrand>(&self, k: i64, phi: &I, exec: Exec) -> Result<ThetaValue, ModelError> {
        if k < 1 {
            return Err(ModelError::BadLevel(k));
        }
        if self.is_compact() {
            let theta = self.theta_distribution(k)?;
            let value = theta.pair_with(phi, &Default::default(), exec)?;
            return Ok(ThetaValue { value, radius: 2.0, tail_bound: 0.0, atoms: theta.terms().len() });
        }
        self.lattice_sum(k, phi, RootOfUnity::one(), exec)
    }

    /// `Σ_λ m(λ,k) ζ^{Σλ_i} φ(λ/k)` for a torus model.
    pub fn twisted_sum<I: Integrand>(&self, zeta: RootOfUnity, k: i64, phi: &I) -> Result<ThetaValue, ModelError> {
        self.twisted_sum_with(zeta, k, phi, Exec::default())
    }

    pub fn twisted_sum_with<I: Integrand>(
        &self,
        zeta: RootOfUnity,
        k: i64,
        phi: &I,
        exec: Exec,
    ) -> Result<ThetaValue, ModelError> {
        if !self.is_torus() {
            return Err(ModelError::Unsupported("twisted sums are defined for torus models".into()));
        }
        if k < 1 {
            return Err(ModelError::BadLevel(k));
        }
        self.lattice_sum(k, phi, zeta, exec)
    }

    fn lattice_sum<I: Integrand>(&self, k: i64, phi: &I, zeta: RootOfUnity, exec: Exec) -> Result<ThetaValue, ModelError> {
        let r = self.label_rank();
        if phi.dim() != r {
            return Err(DistError::DimensionMismatch { expected: r, got: phi.dim() }.into());
        }
        let (c, p) = self.multiplicity_bound();
        let kf = k as f64;
        let scale = c.max(1.0) * (2.0 * kf).powi(p as i32) * (1.0 + kf).powi(r as i32);
        let tol = TAIL_TOLERANCE / scale;
        let radius = phi.tail_radius(tol, p + 3 * r as u32).ok_or(ModelError::NoCertificate)?;
        let atoms = self.torus_atoms(k, radius)?;
        let values = par::map(exec, &atoms, |(lam, m)| {
            let x: Vec<f64> = lam.iter().map(|&l| l as f64 / kf).collect();
            let phase = zeta.pow_c64(lam.iter().sum());
            phi.value(&x) * phase * *m as f64
        });
        Ok(ThetaValue { value: par::sum_c64(values), radius, tail_bound: tol * scale, atoms: atoms.len() })
    }

    /// `(λ, m(λ,k))` with `m ≠ 0`, covering every `λ` with `|λ/k| ≤ radius`.
    pub fn torus_atoms(&self, k: i64, radius: f64) -> Result<Vec<(Vec<i64>, i64)>, ModelError> {
        let reach = (k as f64 * radius).ceil() as i64;
        let mut out: BTreeMap<Vec<i64>, i64> = BTreeMap::new();
        match &self.kind {
            ModelKind::TStarS1 => {
                for n in -reach..=reach {
                    out.insert(vec![n], 1);
                }
            }
            ModelKind::ComplexLine { w, a } => {
                let mut mu = k * a + w / 2;
                while mu <= reach {
                    out.insert(vec![mu], 1);
                    mu += w;
                }
            }
            ModelKind::ComplexSpace { weights, a } => {
                let xi = positive_functional(weights)?;
                let xi_norm = xi.iter().map(|&x| (x * x) as f64).sum::<f64>().sqrt();
                let steps: Vec<i64> = weights.iter().map(|w| dot(&xi, w)).collect();
                let start: Vec<i64> = (0..a.len())
                    .map(|i| k * a[i] + weights.iter().map(|w| w[i] / 2).sum::<i64>())
                    .collect();
                let budget = (xi_norm * k as f64 * radius).ceil() as i64 - dot(&xi, &start);
                if budget >= 0 {
                    let visits: u128 = steps.iter().map(|s| (budget / s + 1) as u128).product();
                    if visits > ENUMERATION_LIMIT {
                        return Err(ModelError::TooManyPoints(visits));
                    }
                    enumerate_cone(weights, &steps, start, budget, 0, &mut out);
                }
            }
            ModelKind::Custom { pqp, .. } => {
                let r = pqp.rank();
                let side = (2 * reach + 1) as u128;
                if side.pow(r as u32) > ENUMERATION_LIMIT {
                    return Err(ModelError::TooManyPoints(side.pow(r as u32)));
                }
                let mut lam = vec![-reach; r];
                loop {
                    let m = self.multiplicity(&lam, k)?;
                    if m != 0 {
                        out.insert(lam.clone(), m);
                    }
                    if !odometer(&mut lam, -reach, reach) {
                        break;
                    }
                }
                return Ok(out.into_iter().collect());
            }
            ModelKind::Su2Orbit | ModelKind::Su2FlagSquare => return self.compact_support(k),
        }
        for ((lam, kk), &d) in &self.defects {
            if *kk == k {
                *out.entry(lam.clone()).or_insert(0) += d;
            }
        }
        Ok(out.into_iter().filter(|(_, m)| *m != 0).collect())
    }
}

fn check_weight(w: i64) -> Result<(), ModelError> {
    if w % 2 != 0 {
        return Err(ModelError::OddWeight(w));
    }
    if w < 2 {
        return Err(ModelError::BadParameters(format!("weight {w} must be at least 2")));
    }
    Ok(())
}

fn join(v: &[i64]) -> String {
    v.iter().map(i64::to_string).collect::<Vec<_>>().join(",")
}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn enumerate_cone(
    weights: &[Vec<i64>],
    steps: &[i64],
    point: Vec<i64>,
    budget: i64,
    i: usize,
    out: &mut BTreeMap<Vec<i64>, i64>,
) {
    if i == weights.len() {
        *out.entry(point).or_insert(0) += 1;
        return;
    }
    let mut cur = point;
    let mut left = budget;
    while left >= 0 {
        enumerate_cone(weights, steps, cur.clone(), left, i + 1, out);
        for (c, w) in cur.iter_mut().zip(&weights[i]) {
            *c += w;
        }
        left -= steps[i];
    }
}

fn odometer(v: &mut [i64], lo: i64, hi: i64) -> bool {
    for x in v.iter_mut() {
        if *x < hi {
            *x += 1;
            return true;
        }
        *x = lo;
    }
    false
}

/// `a + ℝ₊ⁿ W` for square invertible `W`, as `{x : (W⁻ᵀ)(x − a) ≥ 0}`.
fn cone_image(weights: &[Vec<i64>], a: &[i64]) -> Option<Polyhedron> {
    use crate::quasipoly::HalfSpace;
    let n = weights.len();
    let rat = |x: i64| Rational::from_integer(x.into());
    // rows of the inverse of the matrix with columns w_i
    let cols: Vec<Vec<Rational>> = (0..n).map(|i| (0..n).map(|j| rat(weights[j][i])).collect()).collect();
    let mut halfspaces = Vec::new();
    for i in 0..n {
        let e: Vec<Rational> = (0..n).map(|j| rat(i64::from(i == j))).collect();
        // row i of W⁻¹ solves Wᵀ y = e_i
        let wt: Vec<Vec<Rational>> = (0..n).map(|r| (0..n).map(|c| cols[c][r].clone()).collect()).collect();
        let y = crate::quasipoly::solve_linear(&wt, &e)?;
        let offset = y.iter().zip(a).map(|(yi, ai)| yi * rat(*ai)).sum();
        halfspaces.push(HalfSpace { normal: y, offset });
    }
    Some(Polyhedron::new(n, halfspaces))
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

fn parse_ints(s: &str) -> Result<Vec<i64>, ModelError> {
    let s = s.trim().trim_start_matches('(').trim_end_matches(')');
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|x| x.trim().parse::<i64>().map_err(|_| ModelError::BadParameters(format!("`{x}` is not an integer"))))
        .collect()
}

fn parse_vectors(s: &str) -> Result<Vec<Vec<i64>>, ModelError> {
    let s = s.trim();
    if !s.starts_with('(') {
        return Ok(vec![parse_ints(s)?]);
    }
    s.split(')')
        .map(|chunk| chunk.trim_start_matches([',', ' ', '(']))
        .filter(|chunk| !chunk.trim().is_empty())
        .map(parse_ints)
        .collect()
}

impl FromStr for Model {
    type Err = ModelError;

    /// `t-star-s1`, `complex-line(w,a)`, `complex-space((w..),(w..);(a..))`,
    /// `su2-orbit`, `su2-flag-square`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        match s {
            "t-star-s1" => return Ok(Model::t_star_s1()),
            "su2-orbit" => return Ok(Model::su2_orbit()),
            "su2-flag-square" => return Ok(Model::su2_flag_square()),
            _ => {}
        }
        let unknown = || ModelError::UnknownModel(s.to_string());
        let (head, rest) = s.split_once('(').ok_or_else(unknown)?;
        let args = rest.strip_suffix(')').ok_or_else(unknown)?;
        match head.trim() {
            "complex-line" => {
                let v = parse_ints(args)?;
                match v.as_slice() {
                    [w] => Model::complex_line(*w, 0),
                    [w, a] => Model::complex_line(*w, *a),
                    _ => Err(ModelError::BadParameters("complex-line takes (w, a)".into())),
                }
            }
            "complex-space" => {
                let (ws, a) = match args.split_once(';') {
                    Some((ws, a)) => (ws, Some(a)),
                    None => (args, None),
                };
                let weights = parse_vectors(ws)?;
                let rank = weights.first().map_or(0, Vec::len);
                let a = match a {
                    Some(a) => parse_ints(a)?,
                    None => vec![0; rank],
                };
                Model::complex_space(weights, a)
            }
            _ => Err(unknown()),
        }
    }
}
