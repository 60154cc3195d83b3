//! `semiclassical`: run expansion, functoriality and character checks.
//!
//! Exit codes: 0 pass, 1 check failed, 2 usage or configuration error,
//! 3 numerical error.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use semiclassical::asymptotics::AsymError;
use semiclassical::dist_calc::DistError;
use semiclassical::group_orbits::GroupError;
use semiclassical::models::ModelError;
use semiclassical::quasipoly::QpError;

use commands::{Check, EmKind, Outcome};
use config::RunConfig;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numerical(String),
}

fn is_numerical_dist(e: &DistError) -> bool {
    matches!(e, DistError::Quadrature { .. })
}

fn is_numerical_model(e: &ModelError) -> bool {
    match e {
        ModelError::NoCertificate | ModelError::TooManyPoints(_) => true,
        ModelError::Dist(d) => is_numerical_dist(d),
        ModelError::QuasiPoly(QpError::EnumerationTooLarge(_)) => true,
        ModelError::Group(GroupError::Dist(d)) => is_numerical_dist(d),
        _ => false,
    }
}

impl From<AsymError> for CliError {
    fn from(e: AsymError) -> Self {
        let numerical = match &e {
            AsymError::NonFinite | AsymError::DegenerateFit { .. } | AsymError::NoCertificate => true,
            AsymError::Dist(d) => is_numerical_dist(d),
            AsymError::Model(m) => is_numerical_model(m),
            _ => false,
        };
        if numerical {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Usage(e.to_string())
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        if is_numerical_model(&e) {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Usage(e.to_string())
        }
    }
}

impl From<GroupError> for CliError {
    fn from(e: GroupError) -> Self {
        ModelError::from(e).into()
    }
}

#[derive(Parser, Debug)]
#[command(name = "semiclassical", version, about = "Semi-classical expansions of orbit-measure sums and their checks")]
struct Cli {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct Common {
    /// Model name, e.g. `complex-line(2,0)` or `su2-flag-square`.
    #[arg(long)]
    model: Option<String>,
    /// Piecewise quasi-polynomial document defining a custom torus model.
    #[arg(long)]
    model_file: Option<PathBuf>,
    /// Keep powers down to `k^{-order}`.
    #[arg(long, allow_hyphen_values = true)]
    order: Option<i32>,
    /// Comma-separated levels, e.g. `8,16,32,64`.
    #[arg(long, value_delimiter = ',')]
    kladder: Option<Vec<i64>>,
    /// Rotation number `p/q` of the root of unity.
    #[arg(long)]
    zeta: Option<String>,
    /// Residual tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Directory for CSV and JSON outputs.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Add 1 to one multiplicity, e.g. `lambda=3,k=2`.
    #[arg(long)]
    inject_defect: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact sums against the asymptotic expansion on a k-ladder.
    Verify {
        #[command(flatten)]
        common: Common,
    },
    /// Restriction to the maximal torus, orbit-volume identity, pushforward lemma.
    Functoriality {
        #[arg(value_enum, default_value_t = Check::All)]
        check: Check,
        /// Largest level checked.
        #[arg(long, default_value_t = 50)]
        k: i64,
        #[arg(long, default_value_t = 10)]
        lambda_max: i64,
        #[command(flatten)]
        common: Common,
    },
    /// Euler-Maclaurin coefficient tables with exact rationals.
    Em {
        #[arg(value_enum)]
        kind: EmKind,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        a: i64,
        #[arg(long, default_value_t = 2)]
        w: i64,
        #[command(flatten)]
        common: Common,
    },
    /// SU(2) character formula residuals.
    Kirillov {
        #[arg(long, default_value_t = 10)]
        lambda_max: i64,
        /// Number of grid points on [-1, 1].
        #[arg(long, default_value_t = 41)]
        grid: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Root-of-unity twisted sums.
    Twisted {
        /// A single level instead of the ladder.
        #[arg(long)]
        k: Option<i64>,
        #[command(flatten)]
        common: Common,
    },
}

fn merge(mut cfg: RunConfig, c: &Common) -> RunConfig {
    if c.model.is_some() {
        cfg.model = c.model.clone();
        cfg.model_file = None;
    }
    if c.model_file.is_some() {
        cfg.model_file = c.model_file.clone();
    }
    cfg.order = c.order.or(cfg.order);
    cfg.kladder = c.kladder.clone().or(cfg.kladder);
    cfg.zeta = c.zeta.clone().or(cfg.zeta);
    cfg.tol = c.tol.or(cfg.tol);
    cfg.out = c.out.clone().or(cfg.out);
    cfg.inject_defect = c.inject_defect.clone().or(cfg.inject_defect);
    cfg
}

fn run(cli: Cli) -> Result<(Outcome, Option<PathBuf>), CliError> {
    let base = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let (name, common) = match &cli.command {
        Command::Verify { common } => ("verify", common),
        Command::Functoriality { common, .. } => ("functoriality", common),
        Command::Em { common, .. } => ("em", common),
        Command::Kirillov { common, .. } => ("kirillov", common),
        Command::Twisted { common, .. } => ("twisted", common),
    };
    base.check_command(name)?;
    let cfg = merge(base, common);
    let outcome = match cli.command {
        Command::Verify { .. } => commands::verify(&cfg)?,
        Command::Functoriality { check, k, lambda_max, .. } => commands::functoriality(&cfg, check, k, lambda_max)?,
        Command::Em { kind, a, w, .. } => commands::em(&cfg, kind, a, w)?,
        Command::Kirillov { lambda_max, grid, .. } => commands::kirillov(&cfg, lambda_max, grid)?,
        Command::Twisted { k, .. } => commands::twisted(&cfg, k)?,
    };
    Ok((outcome, cfg.out))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((outcome, out)) => {
            for line in &outcome.lines {
                println!("{line}");
            }
            if let Some(dir) = out {
                if let Err(e) = std::fs::create_dir_all(&dir) {
                    eprintln!("error: cannot create {}: {e}", dir.display());
                    return ExitCode::from(2);
                }
                for (file, text) in &outcome.files {
                    if let Err(e) = std::fs::write(dir.join(file), text) {
                        eprintln!("error: cannot write {file}: {e}");
                        return ExitCode::from(2);
                    }
                }
            }
            ExitCode::from(if outcome.pass { 0 } else { 1 })
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Numerical(msg)) => {
            eprintln!("numerical error: {msg}");
            ExitCode::from(3)
        }
    }
}
