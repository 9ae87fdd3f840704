use std::f64::consts::{PI, SQRT_2};

use super::partition::{finite_exp, partition_geo, partition_lg};
use super::query::LaplaceQuery;
use crate::error::{Error, Result};
use crate::numerics::gamma::{digamma, log_gamma_unchecked, log_spectral_measure};
use crate::numerics::quadrature::{integrate_circles, integrate_verticals};
use crate::numerics::residue::{across_collision, continued_line_integral, GammaFactor};
use crate::twolayer::{GeoParams, LgParams};
use crate::Complex64;

/// Largest number of time points the nested quadrature accepts.
pub const MAX_POINTS: usize = 3;

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn require_points(query: &LaplaceQuery) -> Result<()> {
    if query.k() > MAX_POINTS {
        return Err(Error::Unsupported(format!("{} time points; at most {MAX_POINTS}", query.k())));
    }
    Ok(())
}

/// Tolerance and node budget of the k-fold quadratures.
fn budget(k: usize) -> (f64, usize) {
    match k {
        1 => (1e-12, 1 << 16),
        2 => (1e-10, 1 << 24),
        _ => (1e-8, 1 << 24),
    }
}

fn check_geo(query: &LaplaceQuery, params: &GeoParams) -> Result<()> {
    params.validate()?;
    query.require_width(params.n())?;
    require_points(query)?;
    if params.c1 >= 1.0 || params.c2 >= 1.0 {
        return Err(Error::Unsupported(
            "geometric Laplace transform for c₁ ≥ 1 or c₂ ≥ 1 (analytic continuation not implemented)".into(),
        ));
    }
    let t = &query.t;
    if !(params.c1 < t[0] && t.windows(2).all(|w| w[0] < w[1]) && t[t.len() - 1] * params.c2 < 1.0) {
        return Err(Error::Parameter(format!("need c₁ < t₁ < … < t_k < 1/c₂, got t = {t:?}")));
    }
    for (i, (lo, hi, ti)) in query.segments().enumerate() {
        if let Some(a) = params.a[lo..hi].iter().find(|&&a| a * ti >= 1.0) {
            return Err(Error::Parameter(format!("a·t = {} ≥ 1 on segment {}", a * ti, i + 1)));
        }
    }
    Ok(())
}

/// Unnormalised geometric integrand at (z₁, …, z_k) on unit circles,
/// including the 1/zᵢ of dzᵢ/(2πizᵢ).
fn geo_integrand(z: &[Complex64], query: &LaplaceQuery, params: &GeoParams) -> Complex64 {
    let k = query.k();
    let t = &query.t;
    let mut f = c(1.0);
    for (i, (lo, hi, ti)) in query.segments().enumerate() {
        let zi = z[i];
        let inv = zi.inv();
        f *= (1.0 - zi * zi) * (1.0 - inv * inv) * 0.5 * inv;
        for &a in &params.a[lo..hi] {
            f /= (1.0 - a * ti * zi) * (1.0 - a * ti * inv);
        }
    }
    let (b1, b2) = (params.c1 / t[0], params.c2 * t[k - 1]);
    f /= (1.0 - b1 * z[0]) * (1.0 - b1 / z[0]);
    f /= (1.0 - b2 * z[k - 1]) * (1.0 - b2 / z[k - 1]);
    for i in 0..k - 1 {
        let r = t[i] / t[i + 1];
        let (p, q) = (z[i], z[i + 1]);
        f *= 1.0 - r * r;
        f /= (1.0 - r * p * q) * (1.0 - r * p / q) * (1.0 - r * q / p) * (1.0 - r / (p * q));
    }
    f
}

/// E[∏ tᵢ^{2(L₁(xᵢ) − L₁(xᵢ₋₁))}] for the geometric stationary measure (or
/// E[∏ tᵢ^{2(λ₁^{xᵢ} − λ₁^{xᵢ₋₁})}] for the two-layer measure with bulk
/// rates a), as a k-fold integral over unit circles divided by Z(N).
///
/// Needs c₁, c₂ < 1, c₁ < t₁ < … < t_k < 1/c₂, aᵣtᵢ < 1 and k ≤ 3.
pub fn laplace_geo(query: &LaplaceQuery, params: &GeoParams) -> Result<f64> {
    check_geo(query, params)?;
    let k = query.k();
    let (tol, nodes) = budget(k);
    let radii = vec![1.0; k];
    let v = integrate_circles(|z| geo_integrand(z, query, params), &radii, tol, nodes)?.require("geometric Laplace transform")?;
    Ok(v.re / partition_geo(params)?)
}

fn check_lg(query: &LaplaceQuery, params: &LgParams) -> Result<()> {
    params.validate()?;
    query.require_width(params.n())?;
    require_points(query)?;
    if !(params.u > 0.0 && params.v > 0.0) {
        return Err(Error::Parameter(format!(
            "u = {}, v = {}: the direct integral needs u, v > 0 (see laplace_lg_continued)",
            params.u, params.v
        )));
    }
    let t = &query.t;
    if !(params.u > t[0] && t.windows(2).all(|w| w[0] > w[1]) && t[t.len() - 1] > -params.v) {
        return Err(Error::Parameter(format!("need u > t₁ > … > t_k > −v, got t = {t:?}")));
    }
    for (i, (lo, hi, ti)) in query.segments().enumerate() {
        if let Some(a) = params.alphas[lo..hi].iter().find(|&&a| a + ti <= 0.0) {
            return Err(Error::Parameter(format!("α + t = {} ≤ 0 on segment {}", a + ti, i + 1)));
        }
    }
    Ok(())
}

fn lg_log_integrand(z: &[Complex64], query: &LaplaceQuery, params: &LgParams) -> Complex64 {
    let k = query.k();
    let t = &query.t;
    let lg = log_gamma_unchecked;
    let mut s = c(0.0);
    for (i, (lo, hi, ti)) in query.segments().enumerate() {
        let zi = z[i];
        s += log_spectral_measure(zi);
        for &a in &params.alphas[lo..hi] {
            s += lg(a + ti + zi) + lg(a + ti - zi);
        }
    }
    s += lg(params.u - t[0] + z[0]) + lg(params.u - t[0] - z[0]);
    s += lg(params.v + t[k - 1] + z[k - 1]) + lg(params.v + t[k - 1] - z[k - 1]);
    for i in 0..k - 1 {
        let d = t[i] - t[i + 1];
        let (p, q) = (z[i], z[i + 1]);
        s += lg(d + p + q) + lg(d + p - q) + lg(d - p + q) + lg(d - p - q) - lg(c(2.0 * d));
    }
    s
}

/// E[∏ e^{−2tᵢ(L₁(xᵢ) − L₁(xᵢ₋₁))}] for the log-gamma stationary measure, as a
/// k-fold integral over iℝ divided by Z(N).
///
/// Needs u, v > 0, u > t₁ > … > t_k > −v, αᵣ + tᵢ > 0 and k ≤ 3.
pub fn laplace_lg(query: &LaplaceQuery, params: &LgParams) -> Result<f64> {
    check_lg(query, params)?;
    let k = query.k();
    let (tol, nodes) = budget(k);
    let decay = if k == 1 { 0.5 * PI * params.n() as f64 } else { 0.75 * PI };
    let f = |z: &[Complex64]| finite_exp(lg_log_integrand(z, query, params));
    let v = integrate_verticals(f, &vec![0.0; k], decay, tol, nodes)?.require("log-gamma Laplace transform")?;
    Ok(v.re / partition_lg(params)?)
}

/// Γ(u − t ± z)Γ(v + t ± z)∏Γ(αᵢ + t ± z)/Γ(±2z); the integrand of the
/// one-point transform without its factor 1/2.
fn one_point_factors(params: &LgParams, t: f64) -> Vec<GammaFactor> {
    let mut f = vec![GammaFactor::den(0.0, 2), GammaFactor::den(0.0, -2)];
    let shifts = [params.u - t, params.v + t].into_iter().chain(params.alphas.iter().map(|a| a + t));
    for w in shifts {
        f.push(GammaFactor::num(w, 1));
        f.push(GammaFactor::num(w, -1));
    }
    f
}

/// E[e^{−2tL₁(N)}] continued to u ≤ 0 or v ≤ 0: both the numerator and
/// the normalisation are line integrals corrected by the residues of the
/// poles of Γ(u − t ± z), Γ(v + t ± z) that crossed the line.
///
/// Needs u + α, v + α > 0 and 2t > −α + max(|u|, |v|) with α = min αᵢ.
pub fn laplace_lg_continued(params: &LgParams, t: f64) -> Result<f64> {
    params.validate()?;
    let alpha = params.alphas.iter().cloned().fold(f64::INFINITY, f64::min);
    if params.alphas.is_empty() {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    if !(params.u + alpha > 0.0 && params.v + alpha > 0.0) {
        return Err(Error::Parameter(format!("u + α = {}, v + α = {}", params.u + alpha, params.v + alpha)));
    }
    if !(2.0 * t > -alpha + params.u.abs().max(params.v.abs())) {
        return Err(Error::Parameter(format!("2t = {} ≤ −α + max(|u|, |v|)", 2.0 * t)));
    }
    let decay = 0.5 * PI * params.n() as f64;
    let half = |_: Complex64| c(0.5);
    // A crossed pole landing on a pole of the other side (cancelled by a
    // zero of 1/Γ(±2z)) is resolved by moving (u, v) along a line.
    across_collision(|s| {
        let moved = LgParams { u: params.u + s, v: params.v + s * SQRT_2, ..params.clone() };
        let (num, _) = continued_line_integral(&one_point_factors(&moved, t), half, 0.0, decay, 1e-12)?;
        let (den, _) = continued_line_integral(&one_point_factors(&moved, 0.0), half, 0.0, decay, 1e-12)?;
        Ok(num.re / den.re)
    })
}

/// E[H(n, n)] for the log-gamma polymer started from its stationary profile,
/// −n/Z(N) ∫ Γ(u ± z)Γ(v ± z)Γ(α ± z)^N (ψ(α + z) + ψ(α − z)) / (2Γ(±2z)) dz/(2πi).
/// For u ≤ 0 or v ≤ 0 both integrals are continued by residues.
pub fn mean_free_energy(n: usize, params: &LgParams) -> Result<f64> {
    params.validate()?;
    if params.alphas.is_empty() || !params.is_homogeneous() {
        return Err(Error::Parameter("mean free energy needs N ≥ 1 and a single shape".into()));
    }
    if n == 0 || n % params.n() != 0 {
        return Err(Error::InvalidArgument(format!("n = {n} must be a positive multiple of N = {}", params.n())));
    }
    let alpha = params.alphas[0];
    if !(params.u + alpha > 0.0 && params.v + alpha > 0.0) {
        return Err(Error::Parameter(format!("u + α = {}, v + α = {}", params.u + alpha, params.v + alpha)));
    }
    let decay = 0.5 * PI * params.n() as f64;
    let psi = |z: Complex64| {
        let s = digamma(alpha + z).unwrap_or(c(0.0)) + digamma(alpha - z).unwrap_or(c(0.0));
        0.5 * s
    };
    let ratio = across_collision(|s| {
        let moved = LgParams { u: params.u + s, v: params.v + s * SQRT_2, ..params.clone() };
        let factors = one_point_factors(&moved, 0.0);
        let (num, _) = continued_line_integral(&factors, psi, 0.0, decay, 1e-12)?;
        let (den, _) = continued_line_integral(&factors, |_| c(0.5), 0.0, decay, 1e-12)?;
        Ok(num.re / den.re)
    })?;
    Ok(-(n as f64) * ratio)
}
