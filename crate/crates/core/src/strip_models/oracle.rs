use serde::Serialize;

use crate::error::{Error, Result};
use crate::formulas::LaplaceQuery;
use crate::twolayer::GeoParams;

/// A truncated sum with a certified bound on what truncation can change.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OracleValue {
    pub value: f64,
    pub tail_bound: f64,
    pub cutoff: usize,
}

impl OracleValue {
    pub fn require(self, requested: f64) -> Result<f64> {
        if self.tail_bound > requested {
            return Err(Error::TailBound { bound: self.tail_bound, requested });
        }
        Ok(self.value)
    }
}

/// Sum over walk pairs with every increment at most `cutoff` of the
/// stationary weight ∏ P(ΔL₁)P(ΔL₂)·(c₁c₂)^{−(L₁⊗L₂)(N)} times
/// ∏ t^{2ΔL₁}. The Pitman term is carried by the gap g = L₁ − L₁⊗L₂:
/// a step (k, j) adds min(j, g) to the exponent and moves g to
/// g + k − min(j, g).
fn truncated_mass(params: &GeoParams, times: &[f64], cutoff: usize) -> f64 {
    let n = times.len();
    let a = params.a[0];
    let (c1, c2) = (params.c1, params.c2);
    let q1 = a * c2;
    let q2 = a * c1;
    let c = cutoff;
    // Bottom-walk weights, plain and with the Pitman factor (c₁c₂)^{−j}
    // folded in as (a/c₂)^j; only needed when c₁c₂ > 0.
    let plain: Vec<f64> = (0..=c).map(|j| (1.0 - q2) * q2.powi(j as i32)).collect();
    let boosted: Vec<f64> = if c1 * c2 > 0.0 { (0..=c).map(|j| (1.0 - q2) * (a / c2).powi(j as i32)).collect() } else { plain.clone() };
    // suffix[j] = Σ_{i ≥ j, i ≤ c} plain[i]
    let mut suffix = vec![0.0; c + 2];
    for j in (0..=c).rev() {
        suffix[j] = suffix[j + 1] + plain[j];
    }
    let mut mass = vec![1.0f64];
    for &t in times.iter().take(n) {
        let top: Vec<f64> = (0..=c).map(|k| (1.0 - q1) * (q1 * t * t).powi(k as i32)).collect();
        let mut next = vec![0.0f64; mass.len() + c];
        for (g, &w) in mass.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let lo = g.min(c);
            // j ≤ g: exponent j, gap g + k − j. j > g: exponent g, gap k.
            let beyond = if g >= c || suffix[g + 1] == 0.0 {
                0.0
            } else if g == 0 {
                suffix[1]
            } else {
                suffix[g + 1] * (c1 * c2).powi(-(g as i32))
            };
            for (k, &pk) in top.iter().enumerate() {
                if pk == 0.0 {
                    continue;
                }
                for j in 0..=lo {
                    next[g + k - j] += w * pk * boosted[j];
                }
                if beyond > 0.0 {
                    next[k] += w * pk * beyond;
                }
            }
        }
        while next.last() == Some(&0.0) && next.len() > 1 {
            next.pop();
        }
        mass = next;
    }
    mass.iter().sum()
}

/// Rates of a product measure of geometric walks that dominates the
/// weighted stationary measure: (c₁c₂)^{−L₁⊗L₂} ≤ (c₁c₂)^{−θL₁(N) − (1−θ)L₂(N)}
/// because L₁⊗L₂ ≤ min(L₁(N), L₂(N)). θ balances the two rates.
fn dominating_rates(params: &GeoParams, times: &[f64]) -> (Vec<f64>, f64) {
    let a = params.a[0];
    let (c1, c2) = (params.c1, params.c2);
    let tmax = times.iter().cloned().fold(0.0, f64::max);
    if c1 * c2 == 0.0 {
        return (times.iter().map(|t| a * c2 * t * t).collect(), a * c1);
    }
    let ell = -(c1 * c2).ln();
    let theta = (-(c2 * tmax).ln() / ell).clamp(0.0, 1.0);
    let boost = (theta * ell).exp();
    let top = times.iter().map(|t| a * c2 * t * t * boost).collect();
    (top, a * c1 * ((1.0 - theta) * ell).exp())
}

fn tail_of(params: &GeoParams, times: &[f64], cutoff: usize) -> Result<f64> {
    let a = params.a[0];
    let (top, bottom) = dominating_rates(params, times);
    if top.iter().any(|&r| r >= 1.0) || bottom >= 1.0 {
        return Err(Error::Parameter(format!("no summable dominating walk: rates {top:?}, {bottom}")));
    }
    let mut total = 1.0;
    let mut sum = 0.0;
    for &r in &top {
        total *= (1.0 - a * params.c2) / (1.0 - r) * (1.0 - a * params.c1) / (1.0 - bottom);
        sum += r.powi(cutoff as i32 + 1) + bottom.powi(cutoff as i32 + 1);
    }
    Ok(total * sum)
}

/// Laplace transform E[∏ tᵢ^{2(L₁(xᵢ) − L₁(xᵢ₋₁))}] of the geometric
/// stationary measure by exact enumeration of walk increments up to
/// `cutoff`, divided by the equally truncated total mass. The tail bound
/// covers both truncations.
pub fn brute_force_laplace_geo(params: &GeoParams, query: &LaplaceQuery, cutoff: usize) -> Result<OracleValue> {
    params.validate()?;
    if params.a.is_empty() || !params.is_homogeneous() {
        return Err(Error::Parameter("the walk measure needs N >= 1 and a single bulk rate".into()));
    }
    if params.c1 * params.c2 >= 1.0 {
        return Err(Error::Parameter(format!("c₁c₂ = {} ≥ 1", params.c1 * params.c2)));
    }
    query.require_width(params.n())?;
    if query.t.iter().any(|&t| t <= 0.0) {
        return Err(Error::InvalidArgument("times must be positive".into()));
    }
    let times: Vec<f64> = (1..=params.n()).map(|x| query.t[query.segment_of(x)]).collect();
    let ones = vec![1.0; times.len()];
    let num = truncated_mass(params, &times, cutoff);
    let den = truncated_mass(params, &ones, cutoff);
    let (eps_num, eps_den) = (tail_of(params, &times, cutoff)?, tail_of(params, &ones, cutoff)?);
    let value = num / den;
    let lower = num / (den + eps_den);
    let upper = (num + eps_num) / den;
    Ok(OracleValue { value, tail_bound: (value - lower).max(upper - value), cutoff })
}

/// Total mass of the unnormalised walk weight, which equals
/// Z(N)·(1 − c₁c₂)(1 − ac₁)^N(1 − ac₂)^N.
pub fn walk_normaliser_geo(params: &GeoParams, cutoff: usize) -> Result<OracleValue> {
    params.validate()?;
    if params.a.is_empty() || !params.is_homogeneous() {
        return Err(Error::Parameter("the walk measure needs N >= 1 and a single bulk rate".into()));
    }
    let ones = vec![1.0; params.n()];
    Ok(OracleValue { value: truncated_mass(params, &ones, cutoff), tail_bound: tail_of(params, &ones, cutoff)?, cutoff })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulas::partition_geo;
    use crate::twolayer::{min_plus, WalkPair};

    fn params(n: usize) -> GeoParams {
        GeoParams::homogeneous(n, 0.5, 0.3, 0.4).unwrap()
    }

    #[test]
    fn unit_time_is_total_mass() {
        let v = brute_force_laplace_geo(&params(2), &LaplaceQuery::single(2, 1.0).unwrap(), 80).unwrap();
        assert!((v.value - 1.0).abs() <= 1e-15);
        assert!(v.tail_bound < 1e-12);
    }

    #[test]
    fn one_site_is_a_geometric_variable() {
        // For N = 1 the Pitman term vanishes and L₁(1) ~ Geom(ac₂).
        let p = params(1);
        for t in [0.5, 1.2, 1.9] {
            let v = brute_force_laplace_geo(&p, &LaplaceQuery::single(1, t).unwrap(), 120).unwrap();
            let q = 0.5 * 0.4;
            let exact = (1.0 - q) / (1.0 - q * t * t);
            assert!((v.value - exact).abs() <= v.tail_bound + 1e-14, "t = {t}: {v:?} vs {exact}");
        }
    }

    #[test]
    fn normaliser_matches_partition_function() {
        for n in 1..=3 {
            let p = params(n);
            let w = walk_normaliser_geo(&p, 120).unwrap();
            let z = partition_geo(&p).unwrap() * (1.0 - 0.12) * (0.85f64 * 0.8).powi(n as i32);
            assert!((w.value / z - 1.0).abs() < 1e-11 + w.tail_bound, "N = {n}: {} vs {z}", w.value);
        }
    }

    #[test]
    fn gap_recursion_matches_direct_enumeration() {
        // Direct sum over all increment tuples with entries ≤ 6 at N = 2.
        let p = params(2);
        let (a, c1, c2, t) = (0.5f64, 0.3f64, 0.4f64, 1.3f64);
        let mut direct = 0.0;
        for k1 in 0..=6i64 {
            for k2 in 0..=6i64 {
                for j1 in 0..=6i64 {
                    for j2 in 0..=6i64 {
                        let pair = WalkPair::new(vec![0, k1, k1 + k2], vec![0, j1, j1 + j2]).unwrap();
                        let pit = min_plus(&pair.l1, &pair.l2)[2];
                        let w = (1.0 - a * c2).powi(2) * (a * c2 * t * t).powi((k1 + k2) as i32)
                            * (1.0 - a * c1).powi(2) * (a * c1).powi((j1 + j2) as i32)
                            * (c1 * c2).powi(-(pit as i32));
                        direct += w;
                    }
                }
            }
        }
        let dp = truncated_mass(&p, &[t, t], 6);
        assert!((dp / direct - 1.0).abs() < 1e-13, "{dp} vs {direct}");
    }

    #[test]
    fn nondecreasing_in_time() {
        let p = params(2);
        let mut last = 0.0;
        for i in 0..12 {
            let t = 1.0 + 0.3 * i as f64 / 11.0;
            let v = brute_force_laplace_geo(&p, &LaplaceQuery::single(2, t).unwrap(), 150).unwrap();
            assert!(v.value >= last);
            last = v.value;
        }
    }

    #[test]
    fn small_cutoff_fails_the_requested_bound() {
        let v = brute_force_laplace_geo(&params(2), &LaplaceQuery::single(2, 1.4).unwrap(), 5).unwrap();
        assert!(matches!(v.require(1e-8), Err(Error::TailBound { .. })));
    }
}
