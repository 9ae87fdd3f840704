use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::density::log_baxter2;
use super::doob::GeoDoob;
use super::params::{GeoParams, LgParams, TwoLayerPath, WalkPair};
use super::pitman::{pitman_lg, sample_reference_lg};
use crate::error::{Error, Result};
use crate::stats::{effective_sample_size, weights_ess, McEstimate};

/// Generator for stream `stream` of a seeded family; streams are
/// independent, so parallel runs do not depend on the thread count.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Mass the step sampler may leave unexplored before it gives up.
const STEP_TAIL: f64 = 1e-9;

/// Exact samples of the geometric two-layer path on the horizontal word.
/// Path i uses stream i of `seed`.
pub fn sample_twolayer_geo(params: &GeoParams, seed: u64, count: usize) -> Result<Vec<TwoLayerPath<i64>>> {
    params.require_normalizable()?;
    let doob = GeoDoob::new(params)?;
    sample_twolayer_geo_with(&doob, seed, count)
}

/// As [`sample_twolayer_geo`], reusing precomputed Doob tables.
pub fn sample_twolayer_geo_with(doob: &GeoDoob, seed: u64, count: usize) -> Result<Vec<TwoLayerPath<i64>>> {
    (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i as u64);
            sample_geo_path(doob, &mut rng)
        })
        .collect()
}

fn sample_geo_path<R: Rng + ?Sized>(doob: &GeoDoob, rng: &mut R) -> Result<TwoLayerPath<i64>> {
    let cdf = doob.gap_cdf();
    let u: f64 = rng.gen();
    let g0 = cdf.partition_point(|&c| c < u).min(cdf.len() - 1) as i64;
    let mut states = Vec::with_capacity(doob.n() + 1);
    states.push([g0, 0]);
    for x in 1..=doob.n() {
        let next = sample_geo_step(doob, x, states[x - 1], rng)?;
        states.push(next);
    }
    Ok(TwoLayerPath { states })
}

/// Inverse-CDF draw of μ ≻ λ from the kernel into site x. Candidates are
/// visited by k = μ₁ − λ₁ and then j = μ₂ − λ₂ ∈ [0, ℓ]; the weight of
/// (k, j) is (1 − a)² a^{k+j} q(ℓ + k − j)/q_prev(ℓ).
fn sample_geo_step<R: Rng + ?Sized>(doob: &GeoDoob, x: usize, lambda: [i64; 2], rng: &mut R) -> Result<[i64; 2]> {
    let n = doob.n();
    let p = doob.params();
    let a = p.a[x - 1];
    let ell = lambda[0] - lambda[1];
    let pref = (1.0 - a) * (1.0 - a) / doob.q(n - x + 1, ell)?;
    let q_bound = 2.0 / (1.0 - p.c2).powi(2);
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    let mut ak = 1.0;
    for k in 0.. {
        let mut akj = ak;
        for j in 0..=ell {
            acc += pref * akj * doob.q(n - x, ell + k - j)?;
            if acc >= u {
                return Ok([lambda[0] + k, lambda[1] + j]);
            }
            akj *= a;
        }
        ak *= a;
        // Everything beyond k carries at most pref·q_bound·a^{k+1}/(1 − a)².
        let tail = pref * q_bound * ak / ((1.0 - a) * (1.0 - a));
        if tail < 1e-14 {
            if u - acc > STEP_TAIL {
                return Err(Error::TailBound { bound: u - acc, requested: STEP_TAIL });
            }
            return Ok([lambda[0] + k, lambda[1] + ell]);
        }
    }
    unreachable!("the step loop only exits by returning")
}

/// Settings of the Metropolis sampler for the log-gamma two-layer path.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChainConfig {
    /// Sweeps discarded before sampling; the proposal scales are tuned here.
    pub burn_in: usize,
    /// Sweeps between stored samples.
    pub thin: usize,
    /// Stored samples per chain.
    pub samples: usize,
    pub chains: usize,
    pub initial_scale: f64,
    pub auto_tune: bool,
    pub target_acceptance: f64,
    /// Runs whose total ESS of λ₁ᴺ − λ₁⁰ falls below this are flagged.
    pub min_ess: f64,
}

impl Default for ChainConfig {
    fn default() -> Self {
        ChainConfig {
            burn_in: 2000,
            thin: 5,
            samples: 2000,
            chains: 4,
            initial_scale: 0.5,
            auto_tune: true,
            target_acceptance: 0.3,
            min_ess: 100.0,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct McmcRun {
    /// Chains one after the other, `samples` paths each.
    pub paths: Vec<TwoLayerPath<f64>>,
    pub chains: usize,
    pub acceptance_rate: f64,
    /// Proposal scale per free coordinate after tuning (first chain).
    pub scales: Vec<f64>,
    /// Summed per-chain ESS of λ₁ᴺ − λ₁⁰.
    pub ess: f64,
    pub flagged: bool,
}

impl McmcRun {
    /// Paths of chain c.
    pub fn chain(&self, c: usize) -> &[TwoLayerPath<f64>] {
        let m = self.paths.len() / self.chains;
        &self.paths[c * m..(c + 1) * m]
    }
}

/// Random-walk Metropolis on the 2N + 1 free coordinates (λ₁⁰ and both
/// parts of λ¹, …, λᴺ; λ₂⁰ = 0) targeting the log-gamma two-layer density of
/// the horizontal word. Single-site Gaussian proposals; with `auto_tune`
/// each coordinate's scale is adapted during burn-in and frozen afterwards.
pub fn sample_twolayer_lg_mcmc(params: &LgParams, seed: u64, config: &ChainConfig) -> Result<McmcRun> {
    params.validate()?;
    params.require_normalizable()?;
    if !(config.initial_scale > 0.0 && config.initial_scale.is_finite()) {
        return Err(Error::Parameter(format!("proposal scale {}", config.initial_scale)));
    }
    if config.samples == 0 || config.chains == 0 || config.thin == 0 {
        return Err(Error::InvalidArgument("chain config needs samples, chains and thin >= 1".into()));
    }
    let runs: Vec<ChainOutput> =
        (0..config.chains).into_par_iter().map(|c| run_chain(params, config, stream_rng(seed, c as u64))).collect();
    let mut paths = Vec::with_capacity(config.chains * config.samples);
    let mut ess = 0.0;
    let mut accepted = 0.0;
    for r in &runs {
        let top: Vec<f64> = r.paths.iter().map(|p| p.states[p.n()][0] - p.states[0][0]).collect();
        ess += effective_sample_size(&top);
        accepted += r.acceptance;
    }
    let scales = runs[0].scales.clone();
    for r in runs {
        paths.extend(r.paths);
    }
    Ok(McmcRun {
        paths,
        chains: config.chains,
        acceptance_rate: accepted / config.chains as f64,
        scales,
        ess,
        flagged: ess < config.min_ess,
    })
}

struct ChainOutput {
    paths: Vec<TwoLayerPath<f64>>,
    acceptance: f64,
    scales: Vec<f64>,
}

/// Log-density terms touched by a move of site x.
fn local_terms(params: &LgParams, s: &[[f64; 2]], x: usize) -> f64 {
    let n = params.n();
    let mut t = 0.0;
    if x == 0 {
        t -= params.u * (s[0][0] - s[0][1]);
    }
    if x == n {
        t -= params.v * (s[n][0] - s[n][1]);
    }
    if x >= 1 {
        t += log_baxter2(params.alphas[x - 1], s[x], s[x - 1]);
    }
    if x < n {
        t += log_baxter2(params.alphas[x], s[x + 1], s[x]);
    }
    t
}

fn run_chain(params: &LgParams, config: &ChainConfig, mut rng: ChaCha8Rng) -> ChainOutput {
    let n = params.n();
    // Free coordinates: (0, 0) then (x, 0), (x, 1) for x ≥ 1.
    let coords: Vec<(usize, usize)> =
        std::iter::once((0, 0)).chain((1..=n).flat_map(|x| [(x, 0), (x, 1)])).collect();
    let mut s = vec![[0.0f64; 2]; n + 1];
    let mut scales = vec![config.initial_scale; coords.len()];
    let mut accepts = vec![0usize; coords.len()];
    const BATCH: usize = 50;

    let sweep = |s: &mut Vec<[f64; 2]>, scales: &[f64], accepts: &mut [usize], rng: &mut ChaCha8Rng| {
        for (i, &(x, part)) in coords.iter().enumerate() {
            let before = local_terms(params, s, x);
            let old = s[x][part];
            let step: f64 = rng.sample(StandardNormal);
            s[x][part] = old + scales[i] * step;
            let after = local_terms(params, s, x);
            let log_ratio = after - before;
            let accept = log_ratio >= 0.0 || rng.gen::<f64>() < log_ratio.exp();
            if accept && after.is_finite() {
                accepts[i] += 1;
            } else {
                s[x][part] = old;
            }
        }
    };

    let mut batch = 0usize;
    for t in 0..config.burn_in {
        sweep(&mut s, &scales, &mut accepts, &mut rng);
        if config.auto_tune && (t + 1) % BATCH == 0 {
            batch += 1;
            let gain = (3.0 / (batch as f64).sqrt()).min(1.0);
            for (sc, acc) in scales.iter_mut().zip(accepts.iter_mut()) {
                let rate = *acc as f64 / BATCH as f64;
                *sc *= (gain * (rate - config.target_acceptance)).exp();
                *acc = 0;
            }
        }
    }
    accepts.iter_mut().for_each(|a| *a = 0);
    let mut paths = Vec::with_capacity(config.samples);
    for _ in 0..config.samples {
        for _ in 0..config.thin {
            sweep(&mut s, &scales, &mut accepts, &mut rng);
        }
        paths.push(TwoLayerPath { states: s.clone() });
    }
    let proposals = (config.samples * config.thin * coords.len()) as f64;
    let acceptance = accepts.iter().sum::<usize>() as f64 / proposals;
    ChainOutput { paths, acceptance, scales }
}

/// Reference log-gamma walk pairs with their importance log-weights
/// (u + v)·(L₁ ⊗ L₂)(N). Paths are stored row by row, N + 1 values each.
#[derive(Clone, Debug, Serialize)]
pub struct WeightedWalks {
    pub n: usize,
    pub l1: Vec<f64>,
    pub l2: Vec<f64>,
    pub log_weights: Vec<f64>,
}

impl WeightedWalks {
    pub fn len(&self) -> usize {
        self.log_weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_weights.is_empty()
    }

    pub fn top(&self, i: usize) -> &[f64] {
        &self.l1[i * (self.n + 1)..(i + 1) * (self.n + 1)]
    }

    pub fn bottom(&self, i: usize) -> &[f64] {
        &self.l2[i * (self.n + 1)..(i + 1) * (self.n + 1)]
    }

    /// Kish effective sample size of the weights.
    pub fn ess(&self) -> f64 {
        weights_ess(&self.log_weights)
    }

    /// Self-normalised estimate of E[f(L₁, L₂)] under the stationary walks.
    pub fn estimate<F: Fn(&[f64], &[f64]) -> f64 + Sync>(&self, f: F) -> McEstimate {
        let values: Vec<f64> = (0..self.len()).into_par_iter().map(|i| f(self.top(i), self.bottom(i))).collect();
        McEstimate::self_normalized(&values, &self.log_weights)
    }
}

/// Importance log-weight of a reference pair: the stationary density over
/// the reference density, (u + v)·(L₁ ⊗ L₂)(N).
pub fn importance_log_weight_lg(pair: &WalkPair<f64>, params: &LgParams) -> Result<f64> {
    Ok((params.u + params.v) * pitman_lg(pair)?[pair.n()])
}

const IS_CHUNK: usize = 4096;

/// `count` weighted draws; chunk c of 4096 draws uses stream c of `seed`.
pub fn importance_sample_lg(params: &LgParams, seed: u64, count: usize) -> Result<WeightedWalks> {
    params.validate()?;
    params.require_normalizable()?;
    let n = params.n();
    let chunks: Vec<Result<(Vec<f64>, Vec<f64>, Vec<f64>)>> = (0..count.div_ceil(IS_CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut rng = stream_rng(seed, c as u64);
            let m = IS_CHUNK.min(count - c * IS_CHUNK);
            let (mut l1, mut l2, mut lw) = (Vec::with_capacity(m * (n + 1)), Vec::with_capacity(m * (n + 1)), Vec::with_capacity(m));
            for _ in 0..m {
                let pair = sample_reference_lg(params, &mut rng)?;
                lw.push(importance_log_weight_lg(&pair, params)?);
                l1.extend_from_slice(&pair.l1);
                l2.extend_from_slice(&pair.l2);
            }
            Ok((l1, l2, lw))
        })
        .collect();
    let mut out = WeightedWalks { n, l1: Vec::new(), l2: Vec::new(), log_weights: Vec::new() };
    for ch in chunks {
        let (l1, l2, lw) = ch?;
        out.l1.extend(l1);
        out.l2.extend(l2);
        out.log_weights.extend(lw);
    }
    Ok(out)
}
