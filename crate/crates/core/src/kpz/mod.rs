//! Open KPZ on an interval of length L: the two-layer normalisation
//! Z_{u,v}(L), the growth rate c_{u,v}(L) and its large-L phase diagram.
//!
//! Everything is computed from Z̃ = Z/Γ(u+v), which stays finite (and
//! analytic) across u + v = 0 where Z itself blows up.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::gamma::{gamma_real, log_gamma_unchecked, rgamma};
use crate::numerics::residue::{across_collision, continued_line_integral, GammaFactor};
use crate::stats::McEstimate;
use crate::twolayer::stream_rng;
use crate::Complex64;

/// Full-space growth rate.
pub const BULK_RATE: f64 = -1.0 / 24.0;

const REL_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KpzParams {
    pub u: f64,
    pub v: f64,
    #[serde(rename = "L")]
    pub l: f64,
}

impl KpzParams {
    pub fn new(u: f64, v: f64, l: f64) -> Result<Self> {
        let p = KpzParams { u, v, l };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.l > 0.0 && self.l.is_finite()) {
            return Err(Error::Parameter(format!("L = {} must be positive", self.l)));
        }
        if !(self.u.is_finite() && self.v.is_finite()) {
            return Err(Error::Parameter(format!("u = {}, v = {}", self.u, self.v)));
        }
        Ok(())
    }

    fn shifted(&self, s: f64) -> Self {
        KpzParams { u: self.u + s, v: self.v + s, l: self.l }
    }
}

fn factors(p: &KpzParams) -> [GammaFactor; 6] {
    [
        GammaFactor::num(p.u, 1),
        GammaFactor::num(p.u, -1),
        GammaFactor::num(p.v, 1),
        GammaFactor::num(p.v, -1),
        GammaFactor::den(0.0, 2),
        GammaFactor::den(0.0, -2),
    ]
}

/// ∫ Γ(u±z)Γ(v±z)/Γ(±2z) · z^{2·power} e^{z²L}/2 dz/(2πi), continued in u, v
/// by residues, then divided by Γ(u+v).
fn reduced_moment(p: &KpzParams, power: i32) -> Result<f64> {
    let l = p.l;
    let extra = move |z: Complex64| 0.5 * (z * z).powi(power) * (z * z * l).exp();
    // e^{−Ly²} dominates the polynomial growth of the Gamma ratio.
    let decay = (l * ((1.0 / REL_TOL).ln() + 10.0)).sqrt();
    let (value, _) = continued_line_integral(&factors(p), extra, 0.0, decay, REL_TOL)?;
    Ok(value.re * rgamma(Complex64::new(p.u + p.v, 0.0)).re)
}

/// Z̃_{u,v}(L) = Z_{u,v}(L)/Γ(u+v), continued to all real u, v.
pub fn z_kpz(params: &KpzParams) -> Result<f64> {
    params.validate()?;
    across_collision(|s| reduced_moment(&params.shifted(s), 0))
}

/// Z_{u,v}(L) itself; infinite on u + v ∈ {0, −1, …}.
pub fn z_kpz_unreduced(params: &KpzParams) -> Result<f64> {
    let s = params.u + params.v;
    let g = log_gamma_unchecked(Complex64::new(s, 0.0));
    let sign = if s < 0.0 && (s.floor() as i64) % 2 != 0 { -1.0 } else { 1.0 };
    Ok(z_kpz(params)? * sign * g.re.exp())
}

/// c_{u,v}(L) = −1/24 + ½ ∂_L log Z̃, with ∂_L taken under the integral
/// (an extra z² in the integrand and in every residue).
pub fn c_uv(params: &KpzParams) -> Result<f64> {
    params.validate()?;
    across_collision(|s| {
        let q = params.shifted(s);
        let num = reduced_moment(&q, 1)?;
        let den = reduced_moment(&q, 0)?;
        Ok(BULK_RATE + 0.5 * num / den)
    })
}

/// lim_{L→∞} c_{u,v}(L).
pub fn phase_limit(u: f64, v: f64) -> f64 {
    let m = u.min(v);
    if m >= 0.0 {
        BULK_RATE
    } else {
        BULK_RATE + 0.5 * m * m
    }
}

/// One row of a phase-diagram scan.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PhaseRow {
    pub u: f64,
    pub v: f64,
    #[serde(rename = "L")]
    pub l: f64,
    pub c_uv: f64,
    pub phase_limit: f64,
    /// c_uv − phase_limit.
    pub gap: f64,
}

pub const PHASE_COLUMNS: [&str; 6] = ["u", "v", "L", "c_uv", "phase_limit", "gap"];

impl PhaseRow {
    pub fn fields(&self) -> [f64; 6] {
        [self.u, self.v, self.l, self.c_uv, self.phase_limit, self.gap]
    }
}

/// c_{u,v}(L) over every (u, v) in `grid` and every L in `lengths`, in
/// grid-major order.
pub fn phase_scan(grid: &[(f64, f64)], lengths: &[f64]) -> Result<Vec<PhaseRow>> {
    let cells: Vec<(f64, f64, f64)> = grid
        .iter()
        .flat_map(|&(u, v)| lengths.iter().map(move |&l| (u, v, l)))
        .collect();
    cells
        .par_iter()
        .map(|&(u, v, l)| {
            let c = c_uv(&KpzParams::new(u, v, l)?)?;
            let lim = phase_limit(u, v);
            Ok(PhaseRow { u, v, l, c_uv: c, phase_limit: lim, gap: c - lim })
        })
        .collect()
}

/// Relative standard error above which a Monte Carlo estimate is flagged.
pub const MC_REL_STDERR_FLOOR: f64 = 0.05;
/// Fewest time steps accepted by the Brownian estimators.
pub const MIN_STEPS: usize = 1000;

/// Monte Carlo estimate of E[(∫₀ᴸ e^{−(B₁(s)+B₂(L)−B₂(s))} ds)^{−u−v}] over
/// independent standard Brownian motions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BrownianK {
    pub estimate: McEstimate,
    pub steps: usize,
    pub samples: usize,
    pub flagged: bool,
}

fn check_mc(u: f64, v: f64, l: f64, steps: usize, samples: usize) -> Result<()> {
    KpzParams::new(u, v, l)?;
    if u + v <= 0.0 {
        return Err(Error::Parameter(format!("u + v = {} must be positive for the moment to exist", u + v)));
    }
    if steps < MIN_STEPS {
        return Err(Error::InvalidArgument(format!("{steps} steps; at least {MIN_STEPS}")));
    }
    if samples < 2 {
        return Err(Error::InvalidArgument("need at least two samples".into()));
    }
    Ok(())
}

/// Left-point (Euler) discretisation of the exponential functional from the
/// increments `d1`, `d2`, coarsened by summing `stride` of them at a time.
fn functional(d1: &[f64], d2: &[f64], stride: usize, dt: f64) -> f64 {
    // ∫ e^{−B₁(s)} e^{B₂(s)} ds · e^{−B₂(L)}.
    let (mut b1, mut b2, mut acc) = (0.0f64, 0.0f64, 0.0f64);
    for (c1, c2) in d1.chunks(stride).zip(d2.chunks(stride)) {
        acc += (b2 - b1).exp();
        b1 += c1.iter().sum::<f64>();
        b2 += c2.iter().sum::<f64>();
    }
    acc * dt * stride as f64 * (-b2).exp()
}

/// Per-path values (antithetic pairs averaged) at steps·2^level for
/// level = 0..levels, all computed from the same finest paths.
fn path_values(u: f64, v: f64, l: f64, steps: usize, levels: u32, samples: usize, seed: u64) -> Vec<Vec<f64>> {
    let fine = steps << levels;
    let dt = l / fine as f64;
    let sd = dt.sqrt();
    let power = -(u + v);
    (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i as u64);
            let d1: Vec<f64> = (0..fine).map(|_| sd * rng.sample::<f64, _>(StandardNormal)).collect();
            let d2: Vec<f64> = (0..fine).map(|_| sd * rng.sample::<f64, _>(StandardNormal)).collect();
            let m1: Vec<f64> = d1.iter().map(|x| -x).collect();
            let m2: Vec<f64> = d2.iter().map(|x| -x).collect();
            (0..=levels)
                .map(|lev| {
                    let stride = 1usize << (levels - lev);
                    0.5 * (functional(&d1, &d2, stride, dt).powf(power)
                        + functional(&m1, &m2, stride, dt).powf(power))
                })
                .collect()
        })
        .collect()
}

fn wrap(estimate: McEstimate, steps: usize, samples: usize) -> BrownianK {
    let flagged = !(estimate.stderr <= MC_REL_STDERR_FLOOR * estimate.mean.abs()) || estimate.ess < 0.5 * samples as f64;
    BrownianK { estimate, steps, samples, flagged }
}

fn check_levels(u: f64, v: f64, l: f64, steps: usize, samples: usize) -> Result<()> {
    check_mc(u, v, l, MIN_STEPS, samples)?;
    if steps == 0 {
        return Err(Error::InvalidArgument("zero steps".into()));
    }
    Ok(())
}

/// Estimates at steps, 2·steps, …, 2^levels·steps on shared paths, for
/// studying the discretisation bias. Coarse grids are allowed here.
pub fn brownian_k_levels(
    u: f64,
    v: f64,
    l: f64,
    steps: usize,
    levels: u32,
    samples: usize,
    seed: u64,
) -> Result<Vec<BrownianK>> {
    check_levels(u, v, l, steps, samples)?;
    let values = path_values(u, v, l, steps, levels, samples, seed);
    Ok((0..=levels as usize)
        .map(|lev| {
            let xs: Vec<f64> = values.iter().map(|row| row[lev]).collect();
            wrap(McEstimate::from_iid(&xs), steps << lev, samples)
        })
        .collect())
}

/// Differences between consecutive levels of [`brownian_k_levels`], paired
/// path by path so the noise largely cancels.
pub fn brownian_k_increments(
    u: f64,
    v: f64,
    l: f64,
    steps: usize,
    levels: u32,
    samples: usize,
    seed: u64,
) -> Result<Vec<McEstimate>> {
    check_levels(u, v, l, steps, samples)?;
    let values = path_values(u, v, l, steps, levels, samples, seed);
    Ok((0..levels as usize)
        .map(|lev| {
            let d: Vec<f64> = values.iter().map(|row| row[lev] - row[lev + 1]).collect();
            McEstimate::from_iid(&d)
        })
        .collect())
}

/// Antithetic Euler Monte Carlo for the Brownian moment.
pub fn brownian_k_mc(u: f64, v: f64, l: f64, steps: usize, samples: usize, seed: u64) -> Result<BrownianK> {
    check_mc(u, v, l, steps, samples)?;
    let values = path_values(u, v, l, steps, 0, samples, seed);
    let xs: Vec<f64> = values.iter().map(|row| row[0]).collect();
    Ok(wrap(McEstimate::from_iid(&xs), steps, samples))
}

/// Default step count, 10³ per unit length.
pub fn default_steps(l: f64) -> usize {
    ((l * 1000.0).ceil() as usize).max(MIN_STEPS)
}

/// Quadrature Z against Γ(u+v)e^{−L(u²+v²)/2}·𝒦 from Monte Carlo.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NormalisationCheck {
    pub quadrature: f64,
    pub from_mc: f64,
    pub stderr: f64,
    pub z_score: f64,
    pub flagged: bool,
}

/// Compares the Brownian moment with the quadrature normalisation. With
/// standard (driftless) motions the identity needs u = v.
pub fn check_normalisation(params: &KpzParams, k: &BrownianK) -> Result<NormalisationCheck> {
    if (params.u - params.v).abs() > 1e-12 {
        return Err(Error::Unsupported("the driftless moment identity holds for u = v only".into()));
    }
    let quadrature = z_kpz_unreduced(params)?;
    let scale = gamma_real(params.u + params.v)? * (-0.5 * params.l * (params.u.powi(2) + params.v.powi(2))).exp();
    let from_mc = scale * k.estimate.mean;
    let stderr = scale * k.estimate.stderr;
    Ok(NormalisationCheck {
        quadrature,
        from_mc,
        stderr,
        z_score: (quadrature - from_mc).abs() / stderr,
        flagged: k.flagged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(u: f64, v: f64, l: f64) -> KpzParams {
        KpzParams::new(u, v, l).unwrap()
    }

    #[test]
    fn rejects_bad_length() {
        assert!(KpzParams::new(1.0, 1.0, 0.0).is_err());
        assert!(KpzParams::new(1.0, 1.0, -2.0).is_err());
    }

    #[test]
    fn short_interval_matches_the_barnes_limit() {
        // As L → 0 with u + v < 0 the line integral converges to Γ(u+v), so Z̃ → 1;
        // for u, v > 0 the small-L blow-up is L^{−(u+v)}; check Z̃ at moderate L
        // against direct numerical integration instead.
        let q = p(0.8, 0.6, 0.7);
        let direct = crate::numerics::integrate_real_line(
            |y| {
                let z = Complex64::new(0.0, y);
                let f = factors(&q);
                let g: Complex64 = f.iter().map(|f| f.log_value(z)).sum::<Complex64>().exp();
                0.5 * g * (z * z * q.l).exp()
            },
            0.0,
            2.0,
            1e-12,
        );
        let expect = direct.value.re / (2.0 * std::f64::consts::PI) / gamma_real(1.4).unwrap();
        let got = z_kpz(&q).unwrap();
        assert!((got / expect - 1.0).abs() < 1e-10, "{got} vs {expect}");
    }

    #[test]
    fn symmetric_in_boundary_parameters() {
        for (u, v, l) in [(0.3, 1.2, 2.0), (-0.4, 0.9, 5.0), (-0.2, -0.6, 3.0)] {
            let a = z_kpz(&p(u, v, l)).unwrap();
            let b = z_kpz(&p(v, u, l)).unwrap();
            assert!((a - b).abs() <= 1e-12 * a.abs(), "{a} vs {b}");
            let ca = c_uv(&p(u, v, l)).unwrap();
            let cb = c_uv(&p(v, u, l)).unwrap();
            assert!((ca - cb).abs() < 1e-12, "{ca} vs {cb}");
        }
    }

    #[test]
    fn large_length_bulk_asymptotic() {
        // Z_{1,1}(L)·2√π L^{3/2} → 1, with the ratio moving towards 1.
        let ratio = |l: f64| z_kpz_unreduced(&p(1.0, 1.0, l)).unwrap() * 2.0 * std::f64::consts::PI.sqrt() * l.powf(1.5);
        let (r50, r100) = (ratio(50.0), ratio(100.0));
        assert!((r100 - 1.0).abs() < (r50 - 1.0).abs(), "{r50} {r100}");
        assert!((r100 - 1.0).abs() < 0.1, "{r100}");
    }

    #[test]
    fn negative_boundary_is_dominated_by_its_residues() {
        // Residues at z = ±u each contribute Γ(v−u)e^{u²L}/(2Γ(−2u)).
        let (u, v, l) = (-0.5, 1.0, 30.0);
        let single = gamma_real(v - u).unwrap() / (2.0 * gamma_real(-2.0 * u).unwrap()) * (u * u * l).exp();
        let z = z_kpz(&p(u, v, l)).unwrap();
        assert!((z / (2.0 * single) - 1.0).abs() < 0.01, "{z} vs {}", 2.0 * single);
    }

    #[test]
    fn antidiagonal_is_exact() {
        // On u + v = 0 the reduced normalisation is e^{u²L}.
        for l in [0.5, 3.0, 20.0] {
            let c = c_uv(&p(0.7, -0.7, l)).unwrap();
            assert!((c - (BULK_RATE + 0.5 * 0.49)).abs() < 1e-7, "L = {l}: {c}");
            let z = z_kpz(&p(0.7, -0.7, l)).unwrap();
            assert!((z / (0.49 * l).exp() - 1.0).abs() < 1e-7, "L = {l}: {z}");
        }
    }

    #[test]
    fn continuous_across_the_antidiagonal() {
        let a = c_uv(&p(0.7, -0.7 + 1e-6, 4.0)).unwrap();
        let b = c_uv(&p(0.7, -0.7 - 1e-6, 4.0)).unwrap();
        assert!((a - b).abs() < 1e-5, "{a} vs {b}");
    }

    #[test]
    fn continuous_where_a_pole_crosses_the_line() {
        let l = 10.0;
        let a = c_uv(&p(1e-4, 0.8, l)).unwrap();
        let b = c_uv(&p(-1e-4, 0.8, l)).unwrap();
        let at = c_uv(&p(0.0, 0.8, l)).unwrap();
        assert!((a - b).abs() < 1e-4 && (a - at).abs() < 1e-4, "{a} {at} {b}");
    }

    #[test]
    fn bulk_correction() {
        let l = 200.0;
        let c = c_uv(&p(1.0, 1.0, l)).unwrap();
        assert!((c - BULK_RATE + 0.75 / l).abs() < 0.1 / l, "{}", (c - BULK_RATE) * l);
    }

    #[test]
    fn growth_rate_increases_to_the_bulk_value() {
        // (0, 0) lies on the antidiagonal, where c is constant.
        for (u, v) in [(0.0, 0.0), (0.5, 1.0), (2.0, 0.3)] {
            let mut last = f64::NEG_INFINITY;
            for l in [10.0, 20.0, 50.0, 100.0, 200.0] {
                let c = c_uv(&p(u, v, l)).unwrap();
                assert!(c >= last - 1e-12 && c <= BULK_RATE + 1e-12, "({u}, {v}, {l}): {c}");
                last = c;
            }
        }
    }

    #[test]
    fn phase_limits() {
        assert_eq!(phase_limit(1.0, 1.0), BULK_RATE);
        assert!((phase_limit(-0.5, 1.0) - (BULK_RATE + 0.125)).abs() < 1e-15);
        assert!((phase_limit(-0.3, -0.3) - (BULK_RATE + 0.045)).abs() < 1e-15);
        assert_eq!(phase_limit(2.0, -1.0), BULK_RATE + 0.5);
    }

    #[test]
    fn growth_rate_approaches_the_phase_limit() {
        for (u, v) in [(-0.5, 1.0), (0.8, -0.4), (-0.6, -0.3)] {
            let c = c_uv(&p(u, v, 60.0)).unwrap();
            assert!((c - phase_limit(u, v)).abs() < 0.01, "({u}, {v}): {c}");
        }
    }

    #[test]
    fn scan_rows_on_the_antidiagonal() {
        let rows = phase_scan(&[(0.4, -0.4), (1.0, 1.0)], &[2.0, 8.0]).unwrap();
        assert_eq!(rows.len(), 4);
        for r in &rows[..2] {
            assert!((r.c_uv - (BULK_RATE + 0.08)).abs() < 1e-7, "{r:?}");
            assert!(r.gap.abs() < 1e-7);
        }
        assert_eq!((rows[3].u, rows[3].l), (1.0, 8.0));
    }

    #[test]
    fn mc_validates_inputs() {
        assert!(brownian_k_mc(-1.0, 0.5, 1.0, 1000, 10, 1).is_err());
        assert!(brownian_k_mc(1.0, 1.0, 1.0, 100, 10, 1).is_err());
        let a = brownian_k_mc(1.0, 1.0, 1.0, 1000, 50, 3).unwrap();
        let b = brownian_k_mc(1.0, 1.0, 1.0, 1000, 50, 3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn brownian_moment_matches_the_normalisation() {
        let q = p(1.0, 1.0, 1.0);
        let k = brownian_k_mc(1.0, 1.0, 1.0, default_steps(1.0), 40_000, 11).unwrap();
        let check = check_normalisation(&q, &k).unwrap();
        assert!(!check.flagged);
        assert!(check.z_score < 3.0, "{check:?}");
        assert!(check_normalisation(&p(0.5, 1.5, 1.0), &k).is_err());
    }

    #[test]
    fn euler_bias_is_second_order() {
        // The integrand has constant mean in s, so the left-point rule loses
        // its first-order bias: each doubling divides the increment by ~4.
        let d = brownian_k_increments(1.0, 1.0, 1.0, 8, 3, 200_000, 5).unwrap();
        for w in d.windows(2) {
            let slope = (w[0].mean / w[1].mean).log2();
            assert!((1.5..2.6).contains(&slope), "{:?} {:?} slope {slope}", w[0], w[1]);
        }
        assert!(d[0].mean > 10.0 * d[0].stderr);
    }
}
