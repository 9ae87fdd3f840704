//! Monte Carlo summaries shared by the samplers and simulators.

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// A Monte Carlo estimate with its standard error and effective sample size.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub n: usize,
    pub ess: f64,
}

impl McEstimate {
    /// Plain average of independent draws.
    pub fn from_iid(xs: &[f64]) -> Self {
        let n = xs.len();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = if n > 1 {
            xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64
        } else {
            f64::NAN
        };
        McEstimate { mean, stderr: (var / n as f64).sqrt(), n, ess: n as f64 }
    }

    /// Average of a correlated series (e.g. an MCMC trace); the standard error
    /// uses the effective sample size from the autocorrelation.
    pub fn from_series(xs: &[f64]) -> Self {
        let n = xs.len();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
        let ess = effective_sample_size(xs);
        McEstimate { mean, stderr: (var / ess).sqrt(), n, ess }
    }

    /// Self-normalised importance sampling estimate of E[f] from log-weights.
    pub fn self_normalized(values: &[f64], log_weights: &[f64]) -> Self {
        let n = values.len();
        let top = log_weights.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = log_weights.iter().map(|lw| (lw - top).exp()).collect();
        let sw: f64 = w.iter().sum();
        let sw2: f64 = w.iter().map(|x| x * x).sum();
        let mean = w.iter().zip(values).map(|(w, v)| w * v).sum::<f64>() / sw;
        let var = w.iter().zip(values).map(|(w, v)| (w * (v - mean)).powi(2)).sum::<f64>();
        McEstimate { mean, stderr: var.sqrt() / sw, n, ess: sw * sw / sw2 }
    }

    /// |mean − target| in units of the standard error.
    pub fn z_score(&self, target: f64) -> f64 {
        (self.mean - target).abs() / self.stderr
    }
}

/// ESS of a stationary series by Geyer's initial positive sequence estimator.
pub fn effective_sample_size(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 4 {
        return n as f64;
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    let c0 = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
    if c0 == 0.0 {
        return n as f64;
    }
    let acov = |lag: usize| -> f64 {
        xs[..n - lag].iter().zip(&xs[lag..]).map(|(a, b)| (a - mean) * (b - mean)).sum::<f64>() / n as f64
    };
    // Sum of autocorrelations over pairs (2k, 2k+1) while the pair sums stay positive.
    let mut tau = -1.0;
    let mut lag = 0;
    while lag + 1 < n {
        let pair = (acov(lag) + acov(lag + 1)) / c0;
        if pair <= 0.0 {
            break;
        }
        tau += 2.0 * pair;
        lag += 2;
    }
    (n as f64 / tau.max(1.0 / n as f64)).min(n as f64)
}

/// Effective sample size of a set of importance weights, given in log form.
pub fn weights_ess(log_weights: &[f64]) -> f64 {
    let top = log_weights.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let (s, s2) = log_weights.iter().fold((0.0, 0.0), |(s, s2), lw| {
        let w = (lw - top).exp();
        (s + w, s2 + w * w)
    });
    s * s / s2
}

/// Outcome of a two-sample test.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TwoSampleTest {
    pub statistic: f64,
    pub p_value: f64,
    /// Degrees of freedom (χ²) or 0 (Kolmogorov–Smirnov).
    pub dof: usize,
}

/// χ² test of homogeneity for two samples of integers. Adjacent values are
/// merged until every bin holds at least `min_count` pooled observations.
pub fn chi2_two_sample(a: &[i64], b: &[i64], min_count: usize) -> TwoSampleTest {
    let mut values: Vec<(i64, usize, usize)> = Vec::new();
    let mut all: Vec<(i64, bool)> = a.iter().map(|&v| (v, true)).chain(b.iter().map(|&v| (v, false))).collect();
    all.sort_unstable();
    for (v, first) in all {
        match values.last_mut() {
            Some(last) if last.0 == v => {
                if first {
                    last.1 += 1
                } else {
                    last.2 += 1
                }
            }
            _ => values.push((v, first as usize, (!first) as usize)),
        }
    }
    let mut bins: Vec<(usize, usize)> = Vec::new();
    let mut cur = (0usize, 0usize);
    for (_, ca, cb) in values {
        cur.0 += ca;
        cur.1 += cb;
        if cur.0 + cur.1 >= min_count {
            bins.push(cur);
            cur = (0, 0);
        }
    }
    if cur.0 + cur.1 > 0 {
        match bins.last_mut() {
            Some(last) => {
                last.0 += cur.0;
                last.1 += cur.1;
            }
            None => bins.push(cur),
        }
    }
    if bins.len() < 2 {
        return TwoSampleTest { statistic: 0.0, p_value: 1.0, dof: 0 };
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let total = na + nb;
    let mut stat = 0.0;
    for &(ca, cb) in &bins {
        let pooled = (ca + cb) as f64;
        let (ea, eb) = (pooled * na / total, pooled * nb / total);
        stat += (ca as f64 - ea).powi(2) / ea + (cb as f64 - eb).powi(2) / eb;
    }
    let dof = bins.len() - 1;
    let p_value = 1.0 - ChiSquared::new(dof as f64).expect("positive dof").cdf(stat);
    TwoSampleTest { statistic: stat, p_value, dof }
}

/// Two-sample Kolmogorov–Smirnov test with the asymptotic p-value
/// (Stephens' small-sample correction of the Kolmogorov law).
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> TwoSampleTest {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(|p, q| p.total_cmp(q));
    y.sort_by(|p, q| p.total_cmp(q));
    let (n, m) = (x.len(), y.len());
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < n && j < m {
        let v = x[i].min(y[j]);
        while i < n && x[i] <= v {
            i += 1;
        }
        while j < m && y[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let en = ((n * m) as f64 / (n + m) as f64).sqrt();
    let lambda = (en + 0.12 + 0.11 / en) * d;
    TwoSampleTest { statistic: d, p_value: kolmogorov_survival(lambda), dof: 0 }
}

/// P(K > λ) for the Kolmogorov distribution.
fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let term = (-2.0 * (k * k) as f64 * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}
