//! Run configuration: a versioned TOML document, overridden by flags.

use std::path::{Path, PathBuf};

use semiclassical::dist_calc::TestFunction;
use semiclassical::exact_series::RootOfUnity;
use semiclassical::models::Model;
use semiclassical::poly::Poly;
use semiclassical::quasipoly::PiecewiseQP;
use serde::Deserialize;

use crate::CliError;

pub const CONFIG_VERSION: u32 = 1;
pub const DEFAULT_LADDER: [i64; 4] = [8, 16, 32, 64];
pub const DEFAULT_TOL: f64 = 1e-8;

/// One `poly(x)·exp(−(x−c)ᵀA(x−c))` term of the test function.
#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub center: Vec<f64>,
    /// Defaults to the identity.
    pub form: Option<Vec<Vec<f64>>>,
    pub monomials: Vec<MonomialSpec>,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct MonomialSpec {
    pub exp: Vec<u32>,
    pub coeff: f64,
}

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub version: Option<u32>,
    pub command: Option<String>,
    pub model: Option<String>,
    /// A piecewise quasi-polynomial document defining a custom torus model.
    pub model_file: Option<PathBuf>,
    pub half_dim: Option<usize>,
    pub order: Option<i32>,
    pub kladder: Option<Vec<i64>>,
    /// Rotation number `p/q` of `ζ = e^{2πi p/q}`.
    pub zeta: Option<String>,
    pub tol: Option<f64>,
    pub out: Option<PathBuf>,
    pub inject_defect: Option<String>,
    #[serde(default)]
    pub testfn: Vec<TermSpec>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        let cfg: RunConfig =
            toml::from_str(&text).map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))?;
        match cfg.version {
            Some(CONFIG_VERSION) | None => Ok(cfg),
            Some(v) => Err(CliError::Usage(format!("config version {v} is not supported (expected {CONFIG_VERSION})"))),
        }
    }

    pub fn check_command(&self, command: &str) -> Result<(), CliError> {
        match &self.command {
            Some(c) if c != command => {
                Err(CliError::Usage(format!("config is for `{c}`, but `{command}` was requested")))
            }
            _ => Ok(()),
        }
    }

    /// The model named by `model_file` or `model`, or `default`.
    pub fn model(&self, default: Option<&str>) -> Result<Model, CliError> {
        if let Some(path) = &self.model_file {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
            let pqp = PiecewiseQP::from_toml(&text).map_err(|e| CliError::Usage(e.to_string()))?;
            let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("custom");
            return Model::custom(name, pqp, self.half_dim.unwrap_or(1)).map_err(|e| CliError::Usage(e.to_string()));
        }
        let name = self
            .model
            .as_deref()
            .or(default)
            .ok_or_else(|| CliError::Usage("no model given (use --model)".into()))?;
        let mut model: Model = name.parse().map_err(|e: semiclassical::models::ModelError| CliError::Usage(e.to_string()))?;
        if let Some(spec) = &self.inject_defect {
            let (lam, k) = parse_defect(spec)?;
            model = model
                .with_defect(&[lam], k, 1)
                .map_err(|e| CliError::Usage(format!("cannot inject defect: {e}")))?;
        }
        Ok(model)
    }

    pub fn ladder(&self) -> Result<Vec<i64>, CliError> {
        let l = self.kladder.clone().unwrap_or_else(|| DEFAULT_LADDER.to_vec());
        if l.is_empty() || l.iter().any(|&k| k < 1) {
            return Err(CliError::Usage("k-ladder entries must be positive".into()));
        }
        Ok(l)
    }

    pub fn tol(&self) -> Result<f64, CliError> {
        let t = self.tol.unwrap_or(DEFAULT_TOL);
        if !(t.is_finite() && t > 0.0) {
            return Err(CliError::Usage(format!("tolerance {t} must be positive")));
        }
        Ok(t)
    }

    pub fn zeta(&self, default: &str) -> Result<RootOfUnity, CliError> {
        self.zeta.as_deref().unwrap_or(default).parse().map_err(|e| CliError::Usage(format!("bad --zeta: {e}")))
    }

    /// The configured test function, or `(1 + x₁/2)·exp(−|x − 0.3|²)` in `dim` variables.
    pub fn test_function(&self, dim: usize) -> Result<TestFunction, CliError> {
        if self.testfn.is_empty() {
            let mut p = Poly::one(dim);
            p.add_term(unit(dim), 0.5);
            return TestFunction::gaussian_poly(p, vec![0.3; dim]).map_err(|e| CliError::Usage(e.to_string()));
        }
        let mut out: Option<TestFunction> = None;
        for t in &self.testfn {
            if t.center.len() != dim {
                return Err(CliError::Usage(format!("test function has dimension {}, model needs {dim}", t.center.len())));
            }
            let poly = Poly::from_terms(dim, t.monomials.iter().map(|m| (m.exp.clone(), m.coeff)));
            if t.monomials.iter().any(|m| m.exp.len() != dim) {
                return Err(CliError::Usage("monomial exponent length differs from the dimension".into()));
            }
            let form = t.form.clone().unwrap_or_else(|| identity(dim));
            let f = TestFunction::new(poly, t.center.clone(), form).map_err(|e| CliError::Usage(e.to_string()))?;
            out = Some(match out {
                None => f,
                Some(g) => g.add(&f),
            });
        }
        Ok(out.expect("nonempty"))
    }
}

fn unit(dim: usize) -> Vec<u32> {
    let mut e = vec![0; dim];
    e[0] = 1;
    e
}

fn identity(n: usize) -> Vec<Vec<f64>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect()
}

/// `mu=3,k=2`, `lambda=3,k=2` or `3,2`: add 1 to `m_G(3, 2)`.
pub fn parse_defect(spec: &str) -> Result<(i64, i64), CliError> {
    let bad = || CliError::Usage(format!("bad defect `{spec}`; expected lambda=L,k=K"));
    let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        return Err(bad());
    }
    let value = |s: &str, keys: &[&str]| -> Result<i64, CliError> {
        let v = match s.split_once('=') {
            Some((key, v)) if keys.contains(&key.trim()) => v,
            Some(_) => return Err(bad()),
            None => s,
        };
        v.trim().parse().map_err(|_| bad())
    };
    Ok((value(parts[0], &["mu", "lambda", "λ", "μ"])?, value(parts[1], &["k"])?))
}
