use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::evolve::{lpp_evolve, polymer_evolve, InitialProfile};
use super::weights::{sample_strip_weights_geo_with, sample_strip_weights_lg_with};
use crate::error::{Error, Result};
use crate::stats::{chi2_two_sample, ks_two_sample, TwoSampleTest};
use crate::twolayer::{sample_twolayer_geo, sample_twolayer_lg_mcmc, stream_rng, ChainConfig, GeoParams, LgParams};

/// Per-coordinate pass threshold on p-values.
pub const STATIONARITY_LEVEL: f64 = 0.01;

/// Replica r of the evolution uses this stream plus r, well clear of the
/// streams taken by the initial samplers.
const EVOLVE_STREAM: u64 = 1 << 40;

/// Bins of the χ² test hold at least this many pooled observations.
const MIN_BIN: usize = 20;

/// Which draws are compared before and after the evolution.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Comparison {
    /// First half of the draws against the evolved second half; the two
    /// samples are independent, as the tests assume.
    #[default]
    IndependentHalves,
    /// Every draw against its own evolution. Dependent samples, so the test
    /// is conservative; with m = 0 both samples coincide.
    Paired,
}

#[derive(Clone, Debug, Serialize)]
pub struct CoordinateTest {
    pub site: usize,
    pub statistic: f64,
    pub p_value: f64,
    pub dof: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct StationarityReport {
    pub model: String,
    pub params: serde_json::Value,
    pub m: usize,
    pub n_samples: usize,
    pub comparison: Comparison,
    pub test: String,
    pub coordinates: Vec<CoordinateTest>,
    pub level: f64,
    /// Level / N, for readers who want a family-wise reading.
    pub bonferroni_level: f64,
    pub min_p_value: f64,
    pub passed: bool,
    /// Effective sample size of the initial draws when they are correlated.
    pub ess: Option<f64>,
    pub flagged: bool,
}

impl StationarityReport {
    fn assemble(model: &str, params: serde_json::Value, m: usize, n_samples: usize, comparison: Comparison, test: &str, tests: Vec<TwoSampleTest>) -> Self {
        let coordinates: Vec<CoordinateTest> = tests
            .into_iter()
            .enumerate()
            .map(|(i, t)| CoordinateTest { site: i + 1, statistic: t.statistic, p_value: t.p_value, dof: t.dof })
            .collect();
        let min_p_value = coordinates.iter().map(|c| c.p_value).fold(1.0, f64::min);
        let n = coordinates.len().max(1) as f64;
        StationarityReport {
            model: model.into(),
            params,
            m,
            n_samples,
            comparison,
            test: test.into(),
            level: STATIONARITY_LEVEL,
            bonferroni_level: STATIONARITY_LEVEL / n,
            min_p_value,
            passed: min_p_value > STATIONARITY_LEVEL,
            coordinates,
            ess: None,
            flagged: false,
        }
    }
}

fn split<T: Clone>(draws: &[T], comparison: Comparison) -> (Vec<T>, Vec<T>) {
    match comparison {
        Comparison::Paired => (draws.to_vec(), draws.to_vec()),
        Comparison::IndependentHalves => {
            let h = draws.len() / 2;
            (draws[..h].to_vec(), draws[h..2 * h].to_vec())
        }
    }
}

fn require_samples(count: usize, comparison: Comparison) -> Result<()> {
    let need = match comparison {
        Comparison::Paired => 10,
        Comparison::IndependentHalves => 20,
    };
    if count < need {
        return Err(Error::InvalidArgument(format!("{count} samples; at least {need} needed")));
    }
    Ok(())
}

/// Compares the law of each coordinate of the given geometric profiles with
/// the law after m fresh rows of LPP.
pub fn stationarity_of_profiles_geo(profiles: &[InitialProfile<i64>], params: &GeoParams, m: usize, seed: u64, comparison: Comparison) -> Result<StationarityReport> {
    require_samples(profiles.len(), comparison)?;
    let (before, start) = split(profiles, comparison);
    let after: Vec<InitialProfile<i64>> = start
        .par_iter()
        .enumerate()
        .map(|(r, p)| {
            let mut rng = stream_rng(seed, EVOLVE_STREAM + r as u64);
            let w = sample_strip_weights_geo_with(params, m, &mut rng)?;
            Ok(lpp_evolve(p, &w, m)?.profile)
        })
        .collect::<Result<_>>()?;
    let tests = (1..=params.n())
        .map(|i| {
            let a: Vec<i64> = before.iter().map(|p| p.values[i]).collect();
            let b: Vec<i64> = after.iter().map(|p| p.values[i]).collect();
            chi2_two_sample(&a, &b, MIN_BIN)
        })
        .collect();
    Ok(StationarityReport::assemble("geo", serde_json::to_value(params)?, m, profiles.len(), comparison, "chi2", tests))
}

/// As [`stationarity_of_profiles_geo`] for log-gamma profiles, with a
/// two-sample Kolmogorov–Smirnov test per coordinate.
pub fn stationarity_of_profiles_lg(profiles: &[InitialProfile<f64>], params: &LgParams, m: usize, seed: u64, comparison: Comparison) -> Result<StationarityReport> {
    require_samples(profiles.len(), comparison)?;
    let (before, start) = split(profiles, comparison);
    let after: Vec<InitialProfile<f64>> = start
        .par_iter()
        .enumerate()
        .map(|(r, p)| {
            let mut rng = stream_rng(seed, EVOLVE_STREAM + r as u64);
            let w = sample_strip_weights_lg_with(params, m, &mut rng)?;
            Ok(polymer_evolve(p, &w, m)?.profile)
        })
        .collect::<Result<_>>()?;
    let tests = (1..=params.n())
        .map(|i| {
            let a: Vec<f64> = before.iter().map(|p| p.values[i]).collect();
            let b: Vec<f64> = after.iter().map(|p| p.values[i]).collect();
            ks_two_sample(&a, &b)
        })
        .collect();
    Ok(StationarityReport::assemble("lg", serde_json::to_value(params)?, m, profiles.len(), comparison, "ks", tests))
}

/// Stationarity check with initial profiles from the exact two-layer
/// sampler: G₀ is the top layer x ↦ λ₁ˣ − λ₁⁰.
pub fn stationarity_report_geo(params: &GeoParams, m: usize, samples: usize, seed: u64, comparison: Comparison) -> Result<StationarityReport> {
    let paths = sample_twolayer_geo(params, seed, samples)?;
    let profiles: Vec<InitialProfile<i64>> = paths.iter().map(|p| InitialProfile { values: p.top_increments() }).collect();
    stationarity_of_profiles_geo(&profiles, params, m, seed, comparison)
}

/// Stationarity check with initial profiles from the Metropolis sampler.
/// The report carries the chain ESS and is flagged when it is below
/// `config.min_ess`.
pub fn stationarity_report_lg(params: &LgParams, m: usize, config: &ChainConfig, seed: u64, comparison: Comparison) -> Result<StationarityReport> {
    let run = sample_twolayer_lg_mcmc(params, seed, config)?;
    let profiles: Vec<InitialProfile<f64>> = run.paths.iter().map(|p| InitialProfile { values: p.top_increments() }).collect();
    let mut report = stationarity_of_profiles_lg(&profiles, params, m, seed, comparison)?;
    report.ess = Some(run.ess);
    report.flagged = run.flagged;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_rows_reproduce_the_sample() {
        let p = GeoParams::homogeneous(2, 0.5, 0.3, 0.4).unwrap();
        let r = stationarity_report_geo(&p, 0, 400, 1, Comparison::Paired).unwrap();
        assert!(r.coordinates.iter().all(|c| c.p_value == 1.0), "{r:?}");
        assert!(r.passed);
    }

    #[test]
    fn flat_start_is_rejected() {
        let p = GeoParams::homogeneous(2, 0.5, 0.3, 0.4).unwrap();
        let flat = vec![InitialProfile::flat(2); 2000];
        let r = stationarity_of_profiles_geo(&flat, &p, 3, 2, Comparison::IndependentHalves).unwrap();
        assert!(r.min_p_value < 1e-3, "{r:?}");
        assert!(!r.passed);
    }

    #[test]
    fn report_serialises_with_per_site_entries() {
        let p = GeoParams::homogeneous(2, 0.5, 0.3, 0.4).unwrap();
        let r = stationarity_report_geo(&p, 1, 200, 3, Comparison::IndependentHalves).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["coordinates"].as_array().unwrap().len(), 2);
        assert_eq!(v["comparison"], "independent_halves");
        assert_eq!(v["n_samples"], 200);
    }

    #[test]
    fn too_few_samples() {
        let p = GeoParams::homogeneous(2, 0.5, 0.3, 0.4).unwrap();
        assert!(stationarity_report_geo(&p, 1, 5, 3, Comparison::Paired).is_err());
    }
}
