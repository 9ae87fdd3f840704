use rand::Rng;
use rand_distr::{Distribution, Gamma, Geometric};
use serde::Serialize;

use super::params::{GeoParams, LgParams, WalkPair};
use crate::error::{Error, Result};
use crate::numerics::gamma::log_gamma_unchecked;
use crate::Complex64;

/// The discrete Pitman map (L₁, L₂) ↦ (L₁ ⊗ L₂, L₂ ⊙ L₁), indexed 0..=N
/// (value 0 at 0). The two components add up to L₁ + L₂.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PitmanPaths {
    pub otimes: Vec<i64>,
    pub odot: Vec<i64>,
}

/// (A ⊗ B)(k) = min_{1≤j≤k} A(j−1) + B(k) − B(j).
pub fn min_plus(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut out = vec![0i64; a.len()];
    let mut lo = i64::MAX;
    for k in 1..a.len() {
        lo = lo.min(a[k - 1] - b[k]);
        out[k] = lo + b[k];
    }
    out
}

/// (A ⊙ B)(k) = max_{1≤j≤k} A(j) + B(k) − B(j−1).
pub fn max_plus(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut out = vec![0i64; a.len()];
    let mut hi = i64::MIN;
    for k in 1..a.len() {
        hi = hi.max(a[k] - b[k - 1]);
        out[k] = hi + b[k];
    }
    out
}

/// Pitman map of an integer walk pair: L₁ ⊗ L₂ and L₂ ⊙ L₁.
pub fn pitman_geo(pair: &WalkPair<i64>) -> Result<PitmanPaths> {
    let (l1, l2) = (&pair.l1, &pair.l2);
    if l1.is_empty() || l1.len() != l2.len() {
        return Err(Error::InvalidArgument("Pitman transform of an empty or ragged pair".into()));
    }
    Ok(PitmanPaths { otimes: min_plus(l1, l2), odot: max_plus(l2, l1) })
}

/// Geometric (log-sum-exp) Pitman transform
/// ⊗(k) = −log Σ_{j=1}^{k} e^{−(L₁(j−1) + L₂(k) − L₂(j))}, with ⊗(0) = 0.
pub fn pitman_lg(pair: &WalkPair<f64>) -> Result<Vec<f64>> {
    let (l1, l2) = (&pair.l1, &pair.l2);
    if l1.is_empty() || l1.len() != l2.len() {
        return Err(Error::InvalidArgument("Pitman transform of an empty or ragged pair".into()));
    }
    let n = l1.len() - 1;
    let mut out = vec![0.0; n + 1];
    // m(k) = −log Σ_{j≤k} e^{−(L₁(j−1) − L₂(j))}, updated by a stable log-add.
    let mut m = f64::INFINITY;
    for k in 1..=n {
        let t = l1[k - 1] - l2[k];
        m = if m.is_infinite() { t } else { -log_add_exp(-m, -t) };
        out[k] = m + l2[k];
    }
    Ok(out)
}

fn log_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// k·ln q with the convention 0·ln 0 = 0.
fn xlog(k: f64, q: f64) -> f64 {
    if k == 0.0 {
        0.0
    } else {
        k * q.ln()
    }
}

fn check_len(n_pair: usize, n_params: usize) -> Result<()> {
    if n_pair != n_params {
        return Err(Error::InvalidArgument(format!(
            "walks have {n_pair} steps but the parameters describe {n_params} sites"
        )));
    }
    Ok(())
}

/// Unnormalised log-density of the geometric stationary walks:
/// −⊗(N)·log(c₁c₂) + log P^{a c₂}(L₁) + log P^{a c₁}(L₂), with geometric
/// reference walks P^q(L) = ∏ q^{ΔL}(1 − q). Off the support: −∞.
pub fn walk_log_weight_geo(pair: &WalkPair<i64>, params: &GeoParams) -> Result<f64> {
    params.validate()?;
    check_len(pair.n(), params.n())?;
    if !pair.has_nonnegative_increments() {
        return Ok(f64::NEG_INFINITY);
    }
    let ot = pitman_geo(pair)?.otimes[pair.n()];
    let mut w = -xlog(ot as f64, params.c1 * params.c2);
    for (i, &a) in params.a.iter().enumerate() {
        let d1 = (pair.l1[i + 1] - pair.l1[i]) as f64;
        let d2 = (pair.l2[i + 1] - pair.l2[i]) as f64;
        w += xlog(d1, a * params.c2) + (1.0 - a * params.c2).ln();
        w += xlog(d2, a * params.c1) + (1.0 - a * params.c1).ln();
    }
    Ok(w)
}

/// log of the reference density (1/Γ(θ)) e^{−θΔ − e^{−Δ}} of one increment.
fn log_gamma_increment(theta: f64, d: f64) -> f64 {
    -log_gamma_unchecked(Complex64::new(theta, 0.0)).re - theta * d - (-d).exp()
}

/// Unnormalised log-density of the log-gamma stationary walks:
/// (u + v)·⊗(N) plus log-gamma reference walks with shapes α + v (top) and
/// α + u (bottom).
pub fn walk_log_weight_lg(pair: &WalkPair<f64>, params: &LgParams) -> Result<f64> {
    params.validate()?;
    check_len(pair.n(), params.n())?;
    let reference = reference_log_density_lg(pair, params);
    let ot = pitman_lg(pair)?[pair.n()];
    Ok((params.u + params.v) * ot + reference)
}

/// log density of the pair under independent log-gamma reference walks.
pub fn reference_log_density_lg(pair: &WalkPair<f64>, params: &LgParams) -> f64 {
    params
        .alphas
        .iter()
        .enumerate()
        .map(|(i, &al)| {
            log_gamma_increment(al + params.v, pair.l1[i + 1] - pair.l1[i])
                + log_gamma_increment(al + params.u, pair.l2[i + 1] - pair.l2[i])
        })
        .sum()
}

/// Independent geometric reference walks, increments Geom(a c₂) and Geom(a c₁).
pub fn sample_reference_geo<R: Rng + ?Sized>(params: &GeoParams, rng: &mut R) -> Result<WalkPair<i64>> {
    let n = params.n();
    let (mut l1, mut l2) = (vec![0i64; n + 1], vec![0i64; n + 1]);
    for (i, &a) in params.a.iter().enumerate() {
        l1[i + 1] = l1[i] + geometric(a * params.c2, rng)?;
        l2[i + 1] = l2[i] + geometric(a * params.c1, rng)?;
    }
    Ok(WalkPair { l1, l2 })
}

/// P(k) = q^k (1 − q) on {0, 1, …}.
fn geometric<R: Rng + ?Sized>(q: f64, rng: &mut R) -> Result<i64> {
    if q == 0.0 {
        return Ok(0);
    }
    let g = Geometric::new(1.0 - q).map_err(|e| Error::Parameter(format!("geometric rate {q}: {e}")))?;
    Ok(g.sample(rng) as i64)
}

/// Independent log-gamma reference walks: each increment is −log G with
/// G ~ Gamma(α + v) on the top walk and Gamma(α + u) on the bottom one.
pub fn sample_reference_lg<R: Rng + ?Sized>(params: &LgParams, rng: &mut R) -> Result<WalkPair<f64>> {
    let n = params.n();
    let (mut l1, mut l2) = (vec![0.0; n + 1], vec![0.0; n + 1]);
    for (i, &al) in params.alphas.iter().enumerate() {
        l1[i + 1] = l1[i] + log_gamma_step(al + params.v, rng)?;
        l2[i + 1] = l2[i] + log_gamma_step(al + params.u, rng)?;
    }
    Ok(WalkPair { l1, l2 })
}

pub(crate) fn log_gamma_step<R: Rng + ?Sized>(shape: f64, rng: &mut R) -> Result<f64> {
    let g = Gamma::new(shape, 1.0).map_err(|e| Error::Parameter(format!("gamma shape {shape}: {e}")))?;
    Ok(-g.sample(rng).ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_walks_have_zero_transforms() {
        let p = WalkPair::new(vec![0i64; 4], vec![0; 4]).unwrap();
        let t = pitman_geo(&p).unwrap();
        assert_eq!(t.otimes, vec![0; 4]);
        assert_eq!(t.odot, vec![0; 4]);
    }

    #[test]
    fn max_plus_definition() {
        let (a, b) = (vec![0i64, 2, 3], vec![0i64, 1, 1]);
        // max{A(1) + B(2) − B(0), A(2) + B(2) − B(1)} = max{3, 3}
        assert_eq!(max_plus(&a, &b)[2], 3);
    }

    #[test]
    fn small_min_plus_example() {
        let p = WalkPair::new(vec![0i64, 2, 3], vec![0, 1, 1]).unwrap();
        // min{0 + 1 − 1, 2 + 1 − 1}
        assert_eq!(pitman_geo(&p).unwrap().otimes[2], 0);
    }

    #[test]
    fn log_sum_exp_examples() {
        let z = WalkPair::new(vec![0.0; 3], vec![0.0; 3]).unwrap();
        let t = pitman_lg(&z).unwrap();
        assert_eq!(t[1], 0.0);
        assert!((t[2] + 2f64.ln()).abs() < 1e-15);
        let p = WalkPair::new(vec![0.0, 1.0, 1.0], vec![0.0, 0.0, 2.0]).unwrap();
        let expected = -((-2f64).exp() + (-1f64).exp()).ln();
        assert!((pitman_lg(&p).unwrap()[2] - expected).abs() < 1e-15);
    }

    #[test]
    fn log_sum_exp_is_stable_for_large_walks() {
        let p = WalkPair::new(vec![0.0, 800.0, 1600.0], vec![0.0, -900.0, -1800.0]).unwrap();
        let t = pitman_lg(&p).unwrap();
        // Terms −(0 − 1800 + 900) = 900 and −(800 − 1800 + 1800) = −800: ⊗ ≈ −900.
        assert!((t[2] + 900.0).abs() < 1e-12, "{}", t[2]);
    }

    #[test]
    fn zero_path_lg_weight() {
        let params = LgParams::homogeneous(3, 1.3, 0.4, 0.7).unwrap();
        let z = WalkPair::new(vec![0.0; 4], vec![0.0; 4]).unwrap();
        let w = walk_log_weight_lg(&z, &params).unwrap();
        let lg = |x: f64| log_gamma_unchecked(Complex64::new(x, 0.0)).re;
        let ot = pitman_lg(&z).unwrap()[3];
        let expected = 3.0 * (-lg(1.3 + 0.7) - 1.0) + 3.0 * (-lg(1.3 + 0.4) - 1.0) + 1.1 * ot;
        assert!((w - expected).abs() < 1e-13);
    }

    #[test]
    fn n1_geo_mass_matches_closed_normaliser() {
        // Σ over (L₁(1), L₂(1)) of the weight, against 1/((1−c₁c₂)(1−ac₁)(1−ac₂))
        // multiplied by the reference normalisations (1−ac₁)(1−ac₂).
        let (a, c1, c2) = (0.5, 0.3, 0.4);
        let params = GeoParams::new(vec![a], c1, c2).unwrap();
        let mut total = 0.0;
        for x in 0..200 {
            for y in 0..200 {
                let p = WalkPair::new(vec![0, x], vec![0, y]).unwrap();
                total += walk_log_weight_geo(&p, &params).unwrap().exp();
            }
        }
        // ⊗(1) = L₁(0) + L₂(1) − L₂(1) = 0, so the reweighting is trivial at N = 1.
        assert!((total - 1.0).abs() < 1e-12, "{total}");
    }

    #[test]
    fn reweighting_vanishes_at_the_critical_line() {
        let params = GeoParams::new(vec![0.5, 0.5], 0.5, 2.0 - 1e-15).unwrap();
        let p = WalkPair::new(vec![0, 3, 4], vec![0, 1, 5]).unwrap();
        let w = walk_log_weight_geo(&p, &params).unwrap();
        let ot = pitman_geo(&p).unwrap().otimes[2] as f64;
        let reweight = -ot * (params.c1 * params.c2).ln();
        assert!(reweight.abs() < 1e-14);
        assert!(w.is_finite());
    }

    #[test]
    fn reference_samplers_are_seeded() {
        let g = GeoParams::homogeneous(5, 0.6, 0.5, 0.7).unwrap();
        let l = LgParams::homogeneous(5, 1.0, 0.5, 0.7).unwrap();
        let mut r1 = ChaCha8Rng::seed_from_u64(9);
        let mut r2 = ChaCha8Rng::seed_from_u64(9);
        assert_eq!(sample_reference_geo(&g, &mut r1).unwrap(), sample_reference_geo(&g, &mut r2).unwrap());
        assert_eq!(sample_reference_lg(&l, &mut r1).unwrap(), sample_reference_lg(&l, &mut r2).unwrap());
    }

    #[test]
    fn log_gamma_increment_mean() {
        // E[−log G] = −ψ(θ); θ = 1 gives Euler's constant.
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let n = 200_000;
        let m: f64 = (0..n).map(|_| log_gamma_step(1.0, &mut rng).unwrap()).sum::<f64>() / n as f64;
        assert!((m - 0.577_215_664_9).abs() < 0.01, "{m}");
    }

    fn walk() -> impl Strategy<Value = Vec<i64>> {
        prop::collection::vec(0i64..6, 1..12).prop_map(|inc| {
            let mut w = vec![0i64];
            for d in inc {
                w.push(w.last().unwrap() + d);
            }
            w
        })
    }

    proptest! {
        #[test]
        fn path_identity(l1 in walk(), seed in 0u64..1000) {
            let n = l1.len();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut l2 = vec![0i64];
            for _ in 1..n {
                l2.push(l2.last().unwrap() + rng.gen_range(0..6));
            }
            let pair = WalkPair::new(l1.clone(), l2.clone()).unwrap();
            let t = pitman_geo(&pair).unwrap();
            for k in 0..n {
                prop_assert_eq!(l1[k] + l2[k], t.otimes[k] + t.odot[k]);
            }
        }

        #[test]
        fn log_sum_exp_is_a_soft_minimum(xs in prop::collection::vec(-5.0f64..5.0, 2..8),
                                        ys in prop::collection::vec(-5.0f64..5.0, 2..8)) {
            let n = xs.len().min(ys.len());
            let mut l1 = vec![0.0];
            let mut l2 = vec![0.0];
            for k in 1..n {
                l1.push(l1[k - 1] + xs[k]);
                l2.push(l2[k - 1] + ys[k]);
            }
            let pair = WalkPair::new(l1.clone(), l2.clone()).unwrap();
            let soft = pitman_lg(&pair).unwrap();
            for k in 1..n {
                let hard = (1..=k).map(|j| l1[j - 1] + l2[k] - l2[j]).fold(f64::INFINITY, f64::min);
                prop_assert!(soft[k] <= hard + 1e-12);
                prop_assert!(soft[k] >= hard - (k as f64).ln() - 1e-12);
            }
        }
    }
}
