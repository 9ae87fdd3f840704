use serde::{Deserialize, Serialize};

use super::weights::StripWeights;
use crate::error::{Error, Result};

/// Initial data G₀ (or H₀) on 0..=N, anchored at G₀(0) = 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InitialProfile<T> {
    pub values: Vec<T>,
}

impl<T: Copy + Default + PartialEq + std::fmt::Debug> InitialProfile<T> {
    pub fn new(values: Vec<T>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidArgument("a profile needs N >= 1".into()));
        }
        if values[0] != T::default() {
            return Err(Error::InvalidArgument(format!("profile must start at 0, got {:?}", values[0])));
        }
        Ok(InitialProfile { values })
    }

    pub fn flat(n: usize) -> Self {
        InitialProfile { values: vec![T::default(); n + 1] }
    }

    pub fn n(&self) -> usize {
        self.values.len() - 1
    }
}

/// Profile after some rows together with the running anchor G(m, m), the
/// height of the left end relative to the origin.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Evolved<T> {
    pub profile: InitialProfile<T>,
    pub anchor: T,
}

fn check(n_profile: usize, n_weights: usize, rows: usize, m: usize) -> Result<()> {
    if n_profile != n_weights {
        return Err(Error::InvalidArgument(format!("profile width {n_profile} but weights for N = {n_weights}")));
    }
    if m > rows {
        return Err(Error::InvalidArgument(format!("{m} rows requested, {rows} sampled")));
    }
    Ok(())
}

/// One row of the strip recursion in profile coordinates: cell k of the new
/// row sits above cell k + 1 of the old one, so it has the predecessor below
/// for k < N and the one to its left for k > 0.
fn row_step<T: Copy>(prev: &[T], w: &[T], combine: impl Fn(T, T) -> T, add: impl Fn(T, T) -> T) -> Vec<T> {
    let n = prev.len() - 1;
    let mut out = Vec::with_capacity(n + 1);
    out.push(add(w[0], prev[1]));
    for k in 1..=n {
        let best = if k < n { combine(out[k - 1], prev[k + 1]) } else { out[k - 1] };
        out.push(add(w[k], best));
    }
    out
}

/// Last passage times after m rows, G(j, j) − recentred: returns
/// Gₘ(i) = G(m + i, m) − G(m, m) and the anchor G(m, m).
pub fn lpp_evolve(profile: &InitialProfile<i64>, weights: &StripWeights<i64>, m: usize) -> Result<Evolved<i64>> {
    check(profile.n(), weights.n, weights.rows, m)?;
    let mut cur = profile.values.clone();
    let mut anchor = 0i64;
    for j in 1..=m {
        let raw = row_step(&cur, weights.row(j), i64::max, |a, b| a + b);
        anchor += raw[0];
        cur = raw.iter().map(|v| v - raw[0]).collect();
    }
    Ok(Evolved { profile: InitialProfile { values: cur }, anchor })
}

fn log_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// Polymer free energies after m rows from log-weights; same recentring as
/// [`lpp_evolve`] with (max, +) replaced by (log-sum-exp, +).
pub fn polymer_evolve(profile: &InitialProfile<f64>, log_weights: &StripWeights<f64>, m: usize) -> Result<Evolved<f64>> {
    check(profile.n(), log_weights.n, log_weights.rows, m)?;
    let mut cur = profile.values.clone();
    let mut anchor = 0.0;
    for j in 1..=m {
        let raw = row_step(&cur, log_weights.row(j), log_add_exp, |a, b| a + b);
        anchor += raw[0];
        cur = raw.iter().map(|v| v - raw[0]).collect();
    }
    Ok(Evolved { profile: InitialProfile { values: cur }, anchor })
}
