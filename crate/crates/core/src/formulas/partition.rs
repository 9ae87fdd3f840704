use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numerics::gamma::{log_gamma_unchecked, log_spectral_measure};
use crate::numerics::quadrature::{integrate_circle, integrate_vertical, ContourSpec};
use crate::numerics::residue::residue_by_circle;
use crate::twolayer::{GeoParams, LgParams};
use crate::Complex64;

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// The integrand of the geometric partition function, including the
/// 1/z of dz/(2πiz).
fn geo_integrand(params: &GeoParams) -> impl Fn(Complex64) -> Complex64 + Sync + '_ {
    move |z: Complex64| {
        let zi = z.inv();
        let mut f = (1.0 - z * z) * (1.0 - zi * zi) * 0.5 * zi;
        for p in [params.c1, params.c2] {
            f /= (1.0 - p * z) * (1.0 - p * zi);
        }
        for &a in &params.a {
            f /= (1.0 - a * z) * (1.0 - a * zi);
        }
        f
    }
}

/// Poles of the geometric integrand that the contour must enclose
/// (z = 0, c₁, c₂, aᵢ) and exclude (their reciprocals).
fn geo_poles(params: &GeoParams) -> (Vec<f64>, Vec<f64>) {
    let mut inner = vec![0.0];
    let mut outer = vec![];
    for &p in [params.c1, params.c2].iter().chain(params.a.iter()) {
        if p > 0.0 {
            inner.push(p);
            outer.push(1.0 / p);
        }
    }
    (inner, outer)
}

/// Normalisation of the geometric two-layer measure,
/// Z(N) = ½∮ (1−z²)(1−1/z²) / ((1−c₁z)(1−c₁/z)(1−c₂z)(1−c₂/z)) ∏ 1/((1−aᵢz)(1−aᵢ/z)) dz/(2πiz).
///
/// For c₁, c₂ < 1 this is the unit-circle integral. When one boundary rate
/// exceeds 1 (with c₁c₂ < 1) the integral is continued analytically: the
/// circle is kept and the residues of the poles that crossed it are added
/// or removed.
pub fn partition_geo(params: &GeoParams) -> Result<f64> {
    params.validate()?;
    params.require_normalizable()?;
    let (inner, outer) = geo_poles(params);
    let all: Vec<f64> = inner.iter().chain(outer.iter()).cloned().collect();
    // A radius near 1 that keeps clear of every pole.
    let radius = [1.0, 0.97, 1.03, 0.93, 1.07]
        .into_iter()
        .find(|r| all.iter().all(|p| (p - r).abs() > 1e-3))
        .ok_or_else(|| Error::Collision(c(1.0)))?;
    let f = geo_integrand(params);
    let spec = ContourSpec::circle(radius).with_tol(1e-13);
    let mut z = integrate_circle(&f, &spec)?.require("partition function")?;
    for &p in &inner {
        if p > radius {
            z += clustered_residue(&f, p, &all)?;
        }
    }
    for &p in &outer {
        if p < radius {
            z -= clustered_residue(&f, p, &all)?;
        }
    }
    Ok(z.re)
}

/// Residue at p by a small circle that stays away from every other pole.
fn clustered_residue<F: Fn(Complex64) -> Complex64 + Sync>(f: &F, p: f64, poles: &[f64]) -> Result<Complex64> {
    let gap = poles
        .iter()
        .filter(|&&q| (q - p).abs() > 1e-9)
        .map(|q| (q - p).abs())
        .fold(f64::INFINITY, f64::min);
    let radius = (gap / 3.0).min(0.1);
    residue_by_circle(f, c(p), radius)
}

/// Z(N) as the sum of the residues at z = 0, c₁, c₂, aᵢ. Distinct poles use
/// the closed form p·G(p) for the factor z/(z − p); coinciding ones fall
/// back to a small circle around the cluster.
pub fn partition_geo_residues(params: &GeoParams) -> Result<f64> {
    params.validate()?;
    params.require_normalizable()?;
    let (inner, outer) = geo_poles(params);
    let f = geo_integrand(params);
    let all: Vec<f64> = inner.iter().chain(outer.iter()).cloned().collect();
    let mut clusters: Vec<Vec<f64>> = Vec::new();
    let mut sorted = inner.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for p in sorted {
        match clusters.last_mut() {
            Some(cl) if p - cl[cl.len() - 1] < 1e-6 => cl.push(p),
            _ => clusters.push(vec![p]),
        }
    }
    let mut total = c(0.0);
    for cl in clusters {
        let p = cl[0];
        if cl.len() == 1 && p != 0.0 {
            // F(z)·(z − p) at z = p, evaluated with the singular factor removed.
            let g = |z: Complex64| -> Complex64 {
                let zi = z.inv();
                let mut v = (1.0 - z * z) * (1.0 - zi * zi) * 0.5 * zi;
                let mut removed = false;
                for &q in [params.c1, params.c2].iter().chain(params.a.iter()) {
                    v /= 1.0 - q * z;
                    if !removed && q == p {
                        // 1/(1 − p/z) = z/(z − p): keep the z, drop the pole.
                        v *= z;
                        removed = true;
                    } else {
                        v /= 1.0 - q * zi;
                    }
                }
                v
            };
            total += g(c(p));
        } else {
            let center = cl.iter().sum::<f64>() / cl.len() as f64;
            let spread = cl.iter().map(|q| (q - center).abs()).fold(0.0, f64::max);
            let others = all
                .iter()
                .filter(|q| !cl.iter().any(|p| (*q - p).abs() < 1e-6))
                .map(|q| (q - center).abs())
                .fold(f64::INFINITY, f64::min);
            let radius = (spread + others) / 2.0;
            total += residue_by_circle(&f, c(center), radius.min(spread + 0.1))?;
        }
    }
    Ok(total.re)
}

/// log of the LG integrand Γ(u ± z)Γ(v ± z)∏Γ(αᵢ ± z)/(2Γ(±2z)) on iℝ.
pub(crate) fn lg_log_integrand(z: Complex64, u: f64, v: f64, alphas: &[f64]) -> Complex64 {
    let mut s = log_gamma_unchecked(u + z) + log_gamma_unchecked(u - z) + log_gamma_unchecked(v + z)
        + log_gamma_unchecked(v - z)
        + log_spectral_measure(z);
    for &a in alphas {
        s += log_gamma_unchecked(a + z) + log_gamma_unchecked(a - z);
    }
    s
}

pub(crate) fn finite_exp(s: Complex64) -> Complex64 {
    let v = s.exp();
    if v.re.is_finite() && v.im.is_finite() {
        v
    } else {
        c(0.0)
    }
}

/// Normalisation of the log-gamma two-layer measure,
/// Z(N) = ∫_{iℝ} Γ(u ± z)Γ(v ± z)∏Γ(αᵢ ± z) / (2Γ(2z)Γ(−2z)) dz/(2πi), u, v > 0, N ≥ 1.
pub fn partition_lg(params: &LgParams) -> Result<f64> {
    params.validate()?;
    params.require_normalizable()?;
    params.require_positive_boundaries()?;
    let (u, v) = (params.u, params.v);
    let f = |z: Complex64| finite_exp(lg_log_integrand(z, u, v, &params.alphas));
    let spec = ContourSpec::vertical(0.0).with_tol(1e-12);
    let decay = 0.5 * PI * params.n() as f64;
    Ok(integrate_vertical(f, &spec, decay)?.require("log-gamma partition function")?.re)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn closed_forms(a1: f64, a2: f64, c1: f64, c2: f64) -> [f64; 3] {
        [
            1.0 / (1.0 - c1 * c2),
            1.0 / ((1.0 - c1 * c2) * (1.0 - a1 * c1) * (1.0 - a1 * c2)),
            (1.0 - a1 * a2 * c1 * c2)
                / ((1.0 - c1 * c2)
                    * (1.0 - a1 * c1)
                    * (1.0 - a1 * c2)
                    * (1.0 - a2 * c1)
                    * (1.0 - a2 * c2)
                    * (1.0 - a1 * a2)),
        ]
    }

    #[test]
    fn small_n_closed_forms() {
        let (a1, a2, c1, c2) = (0.5, 0.6, 0.3, 0.4);
        let exact = closed_forms(a1, a2, c1, c2);
        for (n, a) in [vec![], vec![a1], vec![a1, a2]].into_iter().enumerate() {
            let p = GeoParams::new(a, c1, c2).unwrap();
            let z = partition_geo(&p).unwrap();
            assert!((z / exact[n] - 1.0).abs() < 1e-12, "N = {n}: {z} vs {}", exact[n]);
            let r = partition_geo_residues(&p).unwrap();
            assert!((r / exact[n] - 1.0).abs() < 1e-12, "N = {n} residues: {r} vs {}", exact[n]);
        }
    }

    #[test]
    fn continuation_past_unit_boundary_rate() {
        // c₁ > 1 with c₁c₂ < 1: the closed form is still the answer.
        let (a1, a2, c1, c2) = (0.5, 0.6, 1.4, 0.5);
        let exact = closed_forms(a1, a2, c1, c2);
        let p = GeoParams::new(vec![a1, a2], c1, c2).unwrap();
        let z = partition_geo(&p).unwrap();
        assert!((z / exact[2] - 1.0).abs() < 1e-10, "{z} vs {}", exact[2]);
        let p = GeoParams::new(vec![a1], c2, c1).unwrap();
        assert!((partition_geo(&p).unwrap() / exact[1] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn repeated_bulk_rates_use_the_cluster_residue() {
        let p = GeoParams::homogeneous(3, 0.5, 0.3, 0.4).unwrap();
        let a = partition_geo(&p).unwrap();
        let b = partition_geo_residues(&p).unwrap();
        assert!((a / b - 1.0).abs() < 1e-10, "{a} vs {b}");
    }

    #[test]
    fn lg_closed_forms_for_one_and_two_sites() {
        // Continuous dual Hahn and de Branges–Wilson integrals.
        let g = |x: f64| log_gamma_unchecked(c(x)).re.exp();
        let (u, v, al) = (0.8, 0.6, 1.3);
        let z1 = partition_lg(&LgParams::new(vec![al], u, v).unwrap()).unwrap();
        let e1 = g(u + v) * g(u + al) * g(v + al);
        assert!((z1 / e1 - 1.0).abs() < 1e-11, "{z1} vs {e1}");
        let z2 = partition_lg(&LgParams::new(vec![al, al], u, v).unwrap()).unwrap();
        let e2 = g(u + v) * g(u + al).powi(2) * g(v + al).powi(2) * g(2.0 * al) / g(u + v + 2.0 * al);
        assert!((z2 / e2 - 1.0).abs() < 1e-11, "{z2} vs {e2}");
    }
}
