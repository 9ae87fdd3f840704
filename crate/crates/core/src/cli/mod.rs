//! The `stripstat` command line: parse, resolve the configuration, run one
//! computation and emit it as CSV or JSON with the configuration embedded.

pub mod config;
pub mod suites;

use std::io::Write;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::formulas::{laplace_geo, laplace_lg, partition_geo, partition_lg, LaplaceQuery};
use crate::kpz::{
    brownian_k_mc, c_uv, check_normalisation, default_steps, phase_limit, phase_scan, z_kpz, KpzParams, PHASE_COLUMNS,
};
use crate::strip_models::{stationarity_report_geo, stationarity_report_lg, StationarityReport};
use crate::twolayer::{sample_twolayer_geo, sample_twolayer_lg_mcmc, ChainConfig};
use crate::VERSION;

pub use config::{Command, Format, Model, RunConfig, Settings};
pub use suites::{run_criterion, run_suite, Check, Suite, SuiteOptions};

/// Exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICS: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "stripstat", version, about = "Stationary measures on a strip: sampling, transforms and checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Cmd,

    #[command(flatten)]
    pub settings: Settings,
}

#[derive(Subcommand, Clone, Copy, Debug)]
pub enum Cmd {
    /// Run acceptance checks (--suite, default all).
    Verify,
    /// Draw stationary top/bottom walks (--model, --samples).
    Sample,
    /// Evolve stationary samples and test that their law is unchanged.
    Simulate,
    /// Multipoint Laplace transform (--points, --t).
    Laplace,
    /// Normalising constant of the two-layer measure.
    Partition,
    /// Open-KPZ growth rate; lists of u, v or L give a scan.
    Kpz,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Verify => Command::Verify,
            Cmd::Sample => Command::Sample,
            Cmd::Simulate => Command::Simulate,
            Cmd::Laplace => Command::Laplace,
            Cmd::Partition => Command::Partition,
            Cmd::Kpz => Command::Kpz,
        }
    }
}

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NonConvergence(_) | Error::TailBound { .. } | Error::Collision(_) => EXIT_NUMERICS,
        Error::Io(_) | Error::Json(_) => EXIT_FAILED,
        Error::GammaPole(_) | Error::InvalidArgument(_) | Error::Parameter(_) | Error::Unsupported(_) => EXIT_CONFIG,
    }
}

/// A computed table: column names and rows, plus the JSON form.
pub struct Artifact {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub json: Value,
    /// False when a check inside the run failed.
    pub passed: bool,
}

impl Artifact {
    fn table(columns: &[&str], rows: Vec<Vec<String>>, json: Value) -> Self {
        Artifact { columns: columns.iter().map(|s| s.to_string()).collect(), rows, json, passed: true }
    }

    /// Renders with the resolved configuration and version embedded.
    pub fn render(&self, config: &RunConfig) -> Result<String> {
        let cfg = serde_json::to_value(config)?;
        match config.format {
            Format::Json => {
                let doc = json!({ "version": VERSION, "config": cfg, "result": self.json });
                Ok(serde_json::to_string_pretty(&doc)? + "\n")
            }
            Format::Csv => {
                let mut s = format!("# stripstat {VERSION}\n# config {}\n", serde_json::to_string(&cfg)?);
                s += &self.columns.join(",");
                s.push('\n');
                for r in &self.rows {
                    s += &r.join(",");
                    s.push('\n');
                }
                Ok(s)
            }
        }
    }
}

fn num(x: f64) -> String {
    format!("{x}")
}

fn joined<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";")
}

/// Computes the artifact for a resolved configuration.
pub fn dispatch(config: &RunConfig) -> Result<Artifact> {
    match config.command {
        Command::Verify => verify(config),
        Command::Sample => sample(config),
        Command::Simulate => simulate(config),
        Command::Laplace => laplace(config),
        Command::Partition => partition(config),
        Command::Kpz => kpz(config),
    }
}

fn verify(config: &RunConfig) -> Result<Artifact> {
    let suite = config.settings.suite.unwrap_or(Suite::All);
    let opts = SuiteOptions { tol: config.settings.tol, seed: config.seed };
    let checks = run_suite(suite, &opts)?;
    for c in &checks {
        eprintln!("{c}");
    }
    let passed = checks.iter().all(|c| c.passed);
    let rows = checks
        .iter()
        .map(|c| {
            let relation = serde_json::to_value(c.relation).map(|v| v.as_str().unwrap_or("").to_string()).unwrap_or_default();
            vec![c.criterion.to_string(), c.name.replace(',', ";"), num(c.measured), num(c.limit), relation, c.passed.to_string()]
        })
        .collect();
    let mut a = Artifact::table(
        &["criterion", "name", "measured", "limit", "relation", "passed"],
        rows,
        json!({ "suite": suite, "passed": passed, "checks": checks }),
    );
    a.passed = passed;
    Ok(a)
}

fn sample(config: &RunConfig) -> Result<Artifact> {
    let count = config.settings.samples.unwrap_or(1000);
    let (paths, extra): (Vec<Vec<[f64; 2]>>, Value) = match config.model()? {
        Model::Geo => {
            let p = config.geo()?;
            let draws = sample_twolayer_geo(&p, config.seed, count)?;
            let paths = draws.into_iter().map(|d| d.states.iter().map(|s| [s[0] as f64, s[1] as f64]).collect()).collect();
            (paths, Value::Null)
        }
        Model::Lg => {
            let p = config.lg()?;
            let mut chain = lg_chain(count);
            chain.samples = count.div_ceil(chain.chains);
            let run = sample_twolayer_lg_mcmc(&p, config.seed, &chain)?;
            let paths = run.paths.iter().take(count).map(|d| d.states.clone()).collect();
            (paths, json!({ "acceptance_rate": run.acceptance_rate, "ess": run.ess, "flagged": run.flagged }))
        }
    };
    let mut rows = Vec::new();
    for (i, path) in paths.iter().enumerate() {
        for (x, s) in path.iter().enumerate() {
            rows.push(vec![i.to_string(), x.to_string(), num(s[0]), num(s[1])]);
        }
    }
    let json = json!({ "paths": paths, "chain": extra });
    Ok(Artifact::table(&["path", "x", "lambda1", "lambda2"], rows, json))
}

/// Chain settings for log-gamma sampling: eight chains sharing `samples`.
fn lg_chain(samples: usize) -> ChainConfig {
    let mut c = suites::stationarity_chain();
    c.samples = samples.div_ceil(c.chains).max(1);
    c
}

fn simulate(config: &RunConfig) -> Result<Artifact> {
    let m = config.settings.m.unwrap_or(3);
    let samples = config.settings.samples.unwrap_or(20_000);
    let cmp = config.settings.comparison.unwrap_or_default();
    let report: StationarityReport = match config.model()? {
        Model::Geo => stationarity_report_geo(&config.geo()?, m, samples, config.seed, cmp)?,
        Model::Lg => stationarity_report_lg(&config.lg()?, m, &lg_chain(samples), config.seed, cmp)?,
    };
    let rows = report
        .coordinates
        .iter()
        .map(|c| vec![c.site.to_string(), num(c.statistic), num(c.p_value), c.dof.to_string()])
        .collect();
    let passed = report.passed && !report.flagged;
    let mut a = Artifact::table(&["site", "statistic", "p_value", "dof"], rows, serde_json::to_value(&report)?);
    a.passed = passed;
    Ok(a)
}

fn laplace(config: &RunConfig) -> Result<Artifact> {
    let (points, t) = config.laplace_lists()?;
    let q = LaplaceQuery::new(points.clone(), t.clone())?;
    let (model, value) = match config.model()? {
        Model::Geo => ("geo", laplace_geo(&q, &config.geo()?)?),
        Model::Lg => ("lg", laplace_lg(&q, &config.lg()?)?),
    };
    let n = config.n()?;
    Ok(Artifact::table(
        &["model", "N", "points", "t", "value"],
        vec![vec![model.into(), n.to_string(), joined(&points), joined(&t), num(value)]],
        json!({ "model": model, "N": n, "points": points, "t": t, "value": value }),
    ))
}

fn partition(config: &RunConfig) -> Result<Artifact> {
    let (model, z) = match config.model()? {
        Model::Geo => ("geo", partition_geo(&config.geo()?)?),
        Model::Lg => ("lg", partition_lg(&config.lg()?)?),
    };
    let n = config.n()?;
    Ok(Artifact::table(
        &["model", "N", "Z"],
        vec![vec![model.into(), n.to_string(), num(z)]],
        json!({ "model": model, "N": n, "Z": z }),
    ))
}

#[derive(Serialize)]
struct KpzPoint {
    u: f64,
    v: f64,
    #[serde(rename = "L")]
    l: f64,
    z: f64,
    c_uv: f64,
    phase_limit: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    normalisation: Option<crate::kpz::NormalisationCheck>,
}

fn kpz(config: &RunConfig) -> Result<Artifact> {
    let (us, vs, ls) = config.kpz_lists()?;
    if let ([u], [v], [l]) = (us.as_slice(), vs.as_slice(), ls.as_slice()) {
        let p = KpzParams::new(*u, *v, *l)?;
        let mc = config.settings.mc_samples.unwrap_or(0);
        let normalisation = if mc > 0 {
            let k = brownian_k_mc(*u, *v, *l, default_steps(*l), mc, config.seed)?;
            Some(check_normalisation(&p, &k)?)
        } else {
            None
        };
        let point = KpzPoint { u: *u, v: *v, l: *l, z: z_kpz(&p)?, c_uv: c_uv(&p)?, phase_limit: phase_limit(*u, *v), normalisation };
        let mut cols = vec!["u", "v", "L", "z", "c_uv", "phase_limit"];
        let mut row: Vec<String> = [point.u, point.v, point.l, point.z, point.c_uv, point.phase_limit].map(num).to_vec();
        let mut passed = true;
        if let Some(n) = &point.normalisation {
            cols.extend(["quadrature", "from_mc", "stderr", "z_score"]);
            row.extend([n.quadrature, n.from_mc, n.stderr, n.z_score].map(num));
            passed = !n.flagged;
        }
        let mut a = Artifact::table(&cols, vec![row], serde_json::to_value(&point)?);
        a.passed = passed;
        return Ok(a);
    }
    let grid: Vec<(f64, f64)> = us.iter().flat_map(|&u| vs.iter().map(move |&v| (u, v))).collect();
    let rows = phase_scan(&grid, &ls)?;
    let table = rows.iter().map(|r| r.fields().map(num).to_vec()).collect();
    Ok(Artifact::table(&PHASE_COLUMNS, table, serde_json::to_value(&rows)?))
}

fn write_out(config: &RunConfig, text: &str) -> Result<()> {
    match config.destination() {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            std::fs::write(&path, text)?;
        }
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let config = match RunConfig::resolve(cli.command.into(), &cli.settings) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    let outcome = dispatch(&config).and_then(|a| {
        write_out(&config, &a.render(&config)?)?;
        Ok(a.passed)
    });
    match outcome {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_FAILED,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Parses `std::env::args` and runs.
pub fn main_exit_code() -> i32 {
    run(Cli::parse())
}
