use std::fmt::Write as _;

use semiclassical::asymptotics::{
    em_fulllattice_coefficients, em_halfline_coefficients, exact_vs_expansion, exact_vs_series,
    twisted_halfline_expansion, OrderFitReport, LOOKAHEAD,
};
use semiclassical::exact_series::Rational;
use semiclassical::functoriality::{finite_k_functoriality, mystery_check, pushforward_orbit_check, verify_restriction};
use semiclassical::group_orbits::{kirillov_residual, uniform_grid};
use semiclassical::models::ModelKind;
use semiclassical::par::Exec;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::CliError;

/// Result of a command: verdict, console lines and files for `--out`.
pub struct Outcome {
    pub pass: bool,
    pub lines: Vec<String>,
    pub files: Vec<(String, String)>,
}

impl Outcome {
    fn new(pass: bool, lines: Vec<String>, csv: (&str, String), summary: Value) -> Self {
        let summary = serde_json::to_string_pretty(&summary).expect("json") + "\n";
        Outcome { pass, lines, files: vec![(csv.0.to_string(), csv.1), ("summary.json".to_string(), summary)] }
    }
}

fn fit_json(r: &OrderFitReport) -> Value {
    serde_json::to_value(r.summary()).expect("json")
}

pub fn verify(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let model = cfg.model(None)?;
    let phi = cfg.test_function(model.group().coadjoint_dim())?;
    let default_order = if model.is_torus() { 3 } else { -(model.half_dim() as i32) };
    let n = cfg.order.unwrap_or(default_order);
    let ladder = cfg.ladder()?;
    let r = exact_vs_expansion(&model, &phi, n, &ladder)?;
    let lines = vec![
        r.summary_line(),
        format!("truncation radius {:.3}, tail bound {:.1e}", r.radius, r.tail_bound),
    ];
    let summary = json!({ "command": "verify", "model": model.name(), "report": fit_json(&r) });
    Ok(Outcome::new(r.pass, lines, ("verify.csv", r.to_csv()), summary))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Check {
    All,
    Restriction,
    Mystery,
    Pushforward,
}

pub fn functoriality(cfg: &RunConfig, check: Check, k: i64, lambda_max: i64) -> Result<Outcome, CliError> {
    if k < 1 || lambda_max < 1 {
        return Err(CliError::Usage("--k and --lambda-max must be positive".into()));
    }
    let model = cfg.model(Some("su2-flag-square"))?;
    let tol = cfg.tol()?;
    let mut pass = true;
    let mut lines = Vec::new();
    let mut summary = serde_json::Map::new();
    summary.insert("command".into(), json!("functoriality"));
    summary.insert("model".into(), json!(model.name()));
    let mut csv = ("functoriality.csv", String::from("check,value\n"));

    if matches!(check, Check::All | Check::Restriction) {
        let r = verify_restriction(&model, k, 2 * k)?;
        pass &= r.pass;
        lines.push(format!(
            "restriction: {} points (k <= {k}, |mu| <= {}) {}",
            r.rows.len(),
            2 * k,
            if r.pass { "all equal" } else { "MISMATCH" }
        ));
        if let Some(c) = &r.counterexample {
            lines.push(format!(
                "counterexample: k={} mu={} direct={} restricted={}",
                c.k, c.mu, c.direct, c.restricted
            ));
        }
        summary.insert(
            "restriction".into(),
            json!({ "pass": r.pass, "points": r.rows.len(), "counterexample": r.counterexample }),
        );
        csv = ("restriction.csv", r.to_csv());
    }
    if matches!(check, Check::All | Check::Mystery) {
        let mut ok = true;
        let mut last = None;
        for kk in 1..=k {
            let m = mystery_check(&model, kk)?;
            ok &= m.equal;
            last = Some(m);
        }
        let m = last.expect("k >= 1");
        pass &= ok;
        lines.push(format!("mystery: k={} ({}, {}) {}", k, m.dim_total, m.vol_sum, if ok { "equal" } else { "UNEQUAL" }));
        summary.insert("mystery".into(), json!({ "pass": ok, "k": k, "dim_total": m.dim_total, "vol_sum": m.vol_sum }));
    }
    if matches!(check, Check::All | Check::Pushforward) {
        let grid = uniform_grid(-1.0, 1.0, 41);
        let mut fourier: f64 = 0.0;
        for lam in 1..=lambda_max {
            fourier = fourier.max(pushforward_orbit_check(lam, &grid)?);
        }
        let phis = [cfg.test_function(1)?, semiclassical::dist_calc::TestFunction::gaussian(1)];
        let mut finite: f64 = 0.0;
        for kk in 1..=k.min(10) {
            finite = finite.max(finite_k_functoriality(&model, kk, &phis)?);
        }
        let ok = fourier <= tol && finite <= tol;
        pass &= ok;
        lines.push(format!("pushforward: fourier residual {fourier:.3e}, finite-k residual {finite:.3e} (tol {tol:e})"));
        summary.insert(
            "pushforward".into(),
            json!({ "pass": ok, "fourier_residual": fourier, "finite_k_residual": finite, "tol": tol }),
        );
        if check == Check::Pushforward {
            csv.1 = format!("check,value\nfourier_residual,{fourier:.6e}\nfinite_k_residual,{finite:.6e}\n");
        }
    }
    summary.insert("pass".into(), json!(pass));
    Ok(Outcome::new(pass, lines, csv, Value::Object(summary)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum EmKind {
    Fulllattice,
    Halfline,
}

fn deriv_name(order: u32, at: &str) -> String {
    format!("phi{}({at})", "'".repeat(order as usize))
}

pub fn em(cfg: &RunConfig, kind: EmKind, a: i64, w: i64) -> Result<Outcome, CliError> {
    let n = cfg.order.unwrap_or(3);
    if n < -1 {
        return Err(CliError::Usage(format!("order {n} lies above the leading power")));
    }
    let upto = (n + 1) as u32;
    if upto > semiclassical::asymptotics::MAX_EXPANSION_ORDER {
        return Err(CliError::Usage(format!("order {n} is too large")));
    }
    let rows: Vec<(u32, String, Rational)> = match kind {
        EmKind::Fulllattice => em_fulllattice_coefficients(upto)
            .into_iter()
            .map(|(i, d, c)| (i, deriv_name(d, "0"), c))
            .collect(),
        EmKind::Halfline => {
            if w < 2 || w % 2 != 0 {
                return Err(CliError::Usage(format!("weight {w} must be even and at least 2")));
            }
            em_halfline_coefficients(w, upto)
                .into_iter()
                .map(|(i, c)| (i, deriv_name(i - 1, &a.to_string()), c))
                .collect()
        }
    };
    let lead = match kind {
        EmKind::Fulllattice => "int_0^inf phi".to_string(),
        EmKind::Halfline => format!("(1/{w}) int_{a}^inf phi"),
    };
    let mut csv = String::from("n,power,term,coefficient,decimal\n");
    let mut lines = vec![format!("{:>3}  {:>7}  {:<22} {:>14}", "n", "power", "term", "coefficient")];
    let _ = writeln!(csv, "0,k^1,{lead},1,1");
    lines.push(format!("{:>3}  {:>7}  {:<22} {:>14}", 0, "k^1", lead, "1"));
    let mut table = Vec::new();
    for (i, term, c) in &rows {
        let power = format!("k^{}", 1 - *i as i64);
        let dec = num_traits::ToPrimitive::to_f64(c).unwrap_or(f64::NAN);
        let _ = writeln!(csv, "{i},{power},{term},{c},{dec:.17e}");
        lines.push(format!("{i:>3}  {power:>7}  {term:<22} {:>14}", c.to_string()));
        table.push(json!({ "n": i, "power": 1 - *i as i64, "term": term, "coefficient": c.to_string(), "decimal": dec }));
    }
    let kind_name = match kind {
        EmKind::Fulllattice => "fulllattice",
        EmKind::Halfline => "halfline",
    };
    let summary = json!({ "command": "em", "kind": kind_name, "order": n, "coefficients": table });
    Ok(Outcome::new(true, lines, ("em.csv", csv), summary))
}

pub fn kirillov(cfg: &RunConfig, lambda_max: i64, points: usize) -> Result<Outcome, CliError> {
    if lambda_max < 1 || points < 2 {
        return Err(CliError::Usage("--lambda-max must be positive and --grid at least 2".into()));
    }
    let tol = cfg.tol()?;
    let grid = uniform_grid(-1.0, 1.0, points);
    let mut csv = String::from("lambda,max_residual\n");
    let mut worst: f64 = 0.0;
    for lam in 1..=lambda_max {
        let r = kirillov_residual(lam, &grid)?;
        let _ = writeln!(csv, "{lam},{r:.6e}");
        worst = worst.max(r);
    }
    let pass = worst <= tol;
    let lines = vec![format!(
        "kirillov: lambda <= {lambda_max}, {points} points on [-1,1]: max residual {worst:.3e} (tol {tol:e}) {}",
        if pass { "pass" } else { "FAIL" }
    )];
    let summary = json!({ "command": "kirillov", "lambda_max": lambda_max, "grid": points, "max_residual": worst, "tol": tol, "pass": pass });
    Ok(Outcome::new(pass, lines, ("kirillov.csv", csv), summary))
}

pub fn twisted(cfg: &RunConfig, k: Option<i64>) -> Result<Outcome, CliError> {
    let model = cfg.model(Some("t-star-s1"))?;
    if !model.is_torus() {
        return Err(CliError::Usage(format!("{} is not a torus model", model.name())));
    }
    let zeta = cfg.zeta("1/2")?;
    let tol = cfg.tol()?;
    let phi = cfg.test_function(model.label_rank())?;
    let ladder = match k {
        Some(k) if k >= 1 => vec![k],
        Some(k) => return Err(CliError::Usage(format!("k = {k} must be positive"))),
        None => cfg.ladder()?,
    };
    if let ModelKind::ComplexLine { w, a } = *model.kind() {
        if !zeta.pow(w).is_one() {
            let n = cfg.order.unwrap_or(3);
            if n < 0 {
                return Err(CliError::Usage("order must be nonnegative".into()));
            }
            let series = twisted_halfline_expansion(zeta, a, w, n as u32 + LOOKAHEAD)?;
            let r = exact_vs_series(&format!("{} zeta={zeta}", model.name()), &series, &phi, n, &ladder, |kk| {
                let v = model.twisted_sum(zeta, kk, &phi)?;
                Ok((v.value, v.radius, v.tail_bound))
            }, Exec::default())?;
            let lines = vec![r.summary_line()];
            let summary = json!({ "command": "twisted", "model": model.name(), "zeta": zeta.to_string(), "report": fit_json(&r) });
            return Ok(Outcome::new(r.pass, lines, ("twisted.csv", r.to_csv()), summary));
        }
    }
    let mut csv = String::from("k,re,im,abs\n");
    let mut worst: f64 = 0.0;
    let mut rows = Vec::new();
    for &kk in &ladder {
        let v = model.twisted_sum(zeta, kk, &phi)?;
        let _ = writeln!(csv, "{kk},{:.17e},{:.17e},{:.6e}", v.value.re, v.value.im, v.value.norm());
        worst = worst.max(v.value.norm());
        rows.push(json!({ "k": kk, "abs": v.value.norm(), "radius": v.radius, "tail_bound": v.tail_bound }));
    }
    let pass = worst <= tol;
    let lines = vec![format!(
        "twisted: {} zeta={zeta}: max |sum| {worst:.3e} over k in {:?} (tol {tol:e}) {}",
        model.name(),
        ladder,
        if pass { "pass" } else { "FAIL" }
    )];
    let summary = json!({ "command": "twisted", "model": model.name(), "zeta": zeta.to_string(), "rows": rows, "max_abs": worst, "tol": tol, "pass": pass });
    Ok(Outcome::new(pass, lines, ("twisted.csv", csv), summary))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn em_table_values() {
        let cfg = RunConfig { order: Some(3), ..Default::default() };
        let o = em(&cfg, EmKind::Fulllattice, 0, 2).unwrap();
        let csv = &o.files[0].1;
        assert!(csv.contains(",1/2,"));
        assert!(csv.contains(",-1/12,"));
        assert!(csv.contains(",1/720,"));
        assert_eq!(csv.lines().count(), 6);
    }

    #[test]
    fn twisted_single_level() {
        let cfg = RunConfig { zeta: Some("1/2".into()), ..Default::default() };
        let o = twisted(&cfg, Some(64)).unwrap();
        assert!(o.pass);
        assert!(twisted(&RunConfig { model: Some("su2-orbit".into()), ..Default::default() }, Some(8)).is_err());
    }

    #[test]
    fn model_lookup() {
        let cfg = RunConfig { model: Some("foo".into()), ..Default::default() };
        assert!(matches!(verify(&cfg), Err(CliError::Usage(_))));
    }
}
