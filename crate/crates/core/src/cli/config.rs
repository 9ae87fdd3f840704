//! Run configuration: command-line flags layered over an optional JSON
//! file, then checked for the fields each command needs.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::suites::Suite;
use crate::error::{Error, Result};
use crate::kpz::KpzParams;
use crate::strip_models::Comparison;
use crate::twolayer::{GeoParams, LgParams};

/// Version of the configuration schema written into every artifact.
pub const SCHEMA: u32 = 1;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "STRIPSTAT_OUT_DIR";

pub const DEFAULT_SEED: u64 = 20240601;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Geo,
    Lg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Verify,
    Sample,
    Simulate,
    Laplace,
    Partition,
    Kpz,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Verify => "verify",
            Command::Sample => "sample",
            Command::Simulate => "simulate",
            Command::Laplace => "laplace",
            Command::Partition => "partition",
            Command::Kpz => "kpz",
        }
    }

    fn default_format(self) -> Format {
        match self {
            Command::Verify | Command::Simulate => Format::Json,
            _ => Format::Csv,
        }
    }
}

/// Every setting, as flags and as keys of the config file. Unset values
/// are dropped before merging so a flag only overrides what it names.
#[derive(Args, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    /// JSON file with any of these settings; flags win.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<Model>,

    /// Strip width.
    #[arg(long = "N", global = true)]
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,

    /// Geometric bulk parameters: one value for all columns, or N values.
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<f64>>,

    #[arg(long, global = true, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c1: Option<f64>,

    #[arg(long, global = true, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c2: Option<f64>,

    /// Log-gamma bulk parameters: one value, or N values.
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Vec<f64>>,

    /// Left boundary parameter; a list gives a kpz grid.
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u: Option<Vec<f64>>,

    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v: Option<Vec<f64>>,

    /// Interval length(s) for kpz.
    #[arg(long = "L", global = true, value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(rename = "L", skip_serializing_if = "Option::is_none")]
    pub l: Option<Vec<f64>>,

    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,

    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,

    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,

    #[arg(long, global = true, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub suite: Option<Suite>,

    /// Rows of evolution for simulate.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,

    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,

    #[arg(long, global = true, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub comparison: Option<Comparison>,

    /// Sites 1 ≤ n₁ ≤ … ≤ n_k ≤ N of the Laplace transform.
    #[arg(long, global = true, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<usize>>,

    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<Vec<f64>>,

    /// Brownian Monte Carlo samples for a single kpz point; 0 skips it.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mc_samples: Option<usize>,
}

impl Settings {
    /// `self` with every field set in `over` replaced.
    pub fn overlay(&self, over: &Settings) -> Result<Settings> {
        let mut base = serde_json::to_value(self)?;
        if let (Value::Object(b), Value::Object(o)) = (&mut base, serde_json::to_value(over)?) {
            b.extend(o);
        }
        Ok(serde_json::from_value(base)?)
    }

    pub fn from_file(path: &Path) -> Result<Settings> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidArgument(format!("cannot read config {}: {e}", path.display())))?;
        let mut value: Value = serde_json::from_str(&text)
            .map_err(|e| Error::InvalidArgument(format!("config {} is not JSON: {e}", path.display())))?;
        if let Value::Object(map) = &mut value {
            if let Some(schema) = map.remove("schema") {
                if schema != Value::from(SCHEMA) {
                    return Err(Error::InvalidArgument(format!("config schema {schema}, expected {SCHEMA}")));
                }
            }
            // Artifacts carry their command; it is not a setting.
            map.remove("command");
        }
        serde_json::from_value(value).map_err(|e| Error::InvalidArgument(format!("config {}: {e}", path.display())))
    }
}

/// Fully resolved configuration, as embedded in every artifact.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub schema: u32,
    pub command: Command,
    pub seed: u64,
    pub format: Format,
    #[serde(flatten)]
    pub settings: Settings,
}

impl RunConfig {
    /// Merges the file named by `flags.config` under `flags`, fills defaults
    /// and checks that `command` has what it needs.
    pub fn resolve(command: Command, flags: &Settings) -> Result<RunConfig> {
        let merged = match &flags.config {
            Some(path) => Settings::from_file(path)?.overlay(flags)?,
            None => flags.clone(),
        };
        let config = RunConfig {
            schema: SCHEMA,
            command,
            seed: merged.seed.unwrap_or(DEFAULT_SEED),
            format: merged.format.unwrap_or(command.default_format()),
            settings: Settings { seed: None, format: None, config: None, ..merged },
        };
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<()> {
        if let Some(t) = self.settings.tol {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::InvalidArgument(format!("tol must be positive, got {t}")));
            }
        }
        match self.command {
            Command::Verify | Command::Kpz => {}
            Command::Sample | Command::Simulate | Command::Partition => {
                self.model_params()?;
            }
            Command::Laplace => {
                self.model_params()?;
                self.laplace_lists()?;
            }
        }
        if self.command == Command::Kpz {
            self.kpz_lists()?;
        }
        Ok(())
    }

    fn need<T: Clone>(&self, value: &Option<T>, flag: &str) -> Result<T> {
        value.clone().ok_or_else(|| Error::InvalidArgument(format!("{} needs --{flag}", self.command.name())))
    }

    pub fn model(&self) -> Result<Model> {
        self.need(&self.settings.model, "model")
    }

    pub fn n(&self) -> Result<usize> {
        self.need(&self.settings.n, "N")
    }

    fn scalar(&self, value: &Option<Vec<f64>>, flag: &str) -> Result<f64> {
        match self.need(value, flag)?.as_slice() {
            [x] => Ok(*x),
            xs => Err(Error::InvalidArgument(format!("--{flag} takes one value here, got {}", xs.len()))),
        }
    }

    fn columns(&self, values: Vec<f64>, flag: &str) -> Result<Vec<f64>> {
        let n = self.n()?;
        match values.len() {
            1 => Ok(vec![values[0]; n]),
            k if k == n => Ok(values),
            k => Err(Error::InvalidArgument(format!("--{flag} has {k} values but N = {n}"))),
        }
    }

    pub fn geo(&self) -> Result<GeoParams> {
        let a = self.columns(self.need(&self.settings.a, "a")?, "a")?;
        GeoParams::new(a, self.need(&self.settings.c1, "c1")?, self.need(&self.settings.c2, "c2")?)
    }

    pub fn lg(&self) -> Result<LgParams> {
        let alpha = self.columns(self.need(&self.settings.alpha, "alpha")?, "alpha")?;
        let p = LgParams::new(alpha, self.scalar(&self.settings.u, "u")?, self.scalar(&self.settings.v, "v")?)?;
        p.validate()?;
        Ok(p)
    }

    fn model_params(&self) -> Result<()> {
        match self.model()? {
            Model::Geo => self.geo().map(|_| ()),
            Model::Lg => self.lg().map(|_| ()),
        }
    }

    pub fn laplace_lists(&self) -> Result<(Vec<usize>, Vec<f64>)> {
        Ok((self.need(&self.settings.points, "points")?, self.need(&self.settings.t, "t")?))
    }

    /// (u values, v values, lengths) for kpz.
    pub fn kpz_lists(&self) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
        let u = self.need(&self.settings.u, "u")?;
        let v = self.need(&self.settings.v, "v")?;
        let l = self.need(&self.settings.l, "L")?;
        if u.is_empty() || v.is_empty() || l.is_empty() {
            return Err(Error::InvalidArgument("kpz needs at least one u, v and L".into()));
        }
        for &x in &u {
            for &y in &v {
                for &len in &l {
                    KpzParams::new(x, y, len)?;
                }
            }
        }
        Ok((u, v, l))
    }

    /// Where the artifact goes; None means stdout.
    pub fn destination(&self) -> Option<PathBuf> {
        let dir = std::env::var_os(OUT_DIR_ENV).map(PathBuf::from);
        match (&self.settings.out, dir) {
            (Some(p), Some(d)) if p.is_relative() => Some(d.join(p)),
            (Some(p), _) => Some(p.clone()),
            (None, Some(d)) => Some(d.join(format!("{}.{}", self.command.name(), self.format.extension()))),
            (None, None) => None,
        }
    }
}
