//! gl₂ Whittaker functions, their Baxter kernels and numerical checks of the
//! integral identities they satisfy.
//!
//! Everything is evaluated in log form: the kernels contain factors like
//! e^{−e^{x}} which leave the double range almost immediately. Two-variable
//! Whittaker functions are written as a Bessel K in the difference x₁ − x₂
//! times an exponential in the sum, so plane integrals are taken in the
//! rotated coordinates (x₁ + x₂, x₁ − x₂) where the Bessel factor only has to
//! be evaluated once per grid line.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::LN_2;

use crate::error::{Error, Result};
use crate::numerics::gamma::{log_gamma, rgamma};
use crate::numerics::{
    integrate_plane, integrate_plane_split, integrate_real_line, integrate_vertical, log_bessel_k,
    ContourSpec, PlaneOptions, QuadratureResult,
};

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Spectral parameters (α₁, …, αₙ).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WhittakerIndex {
    pub alphas: Vec<Complex64>,
}

impl WhittakerIndex {
    pub fn new(alphas: Vec<Complex64>) -> Result<Self> {
        if alphas.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite spectral parameter in {alphas:?}")));
        }
        Ok(WhittakerIndex { alphas })
    }

    pub fn real(alphas: &[f64]) -> Result<Self> {
        Self::new(alphas.iter().map(|&a| c(a)).collect())
    }

    pub fn len(&self) -> usize {
        self.alphas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphas.is_empty()
    }
}

/// A point x ∈ ℝⁿ at which Whittaker functions and kernels are evaluated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealPoint {
    pub coords: Vec<f64>,
}

impl RealPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite coordinate in {coords:?}")));
        }
        Ok(RealPoint { coords })
    }
}

/// log Ψ_{z₁,z₂}(x₁, x₂) = log 2 − (z₁+z₂)(x₁+x₂)/2 + log K_{z₁−z₂}(2e^{−(x₁−x₂)/2}).
pub fn log_psi2(z1: Complex64, z2: Complex64, x1: f64, x2: f64) -> Result<Complex64> {
    let arg = 2.0 * (-(x1 - x2) / 2.0).exp();
    if arg == 0.0 || !arg.is_finite() {
        return Err(Error::InvalidArgument(format!("psi2 out of range at x = ({x1}, {x2})")));
    }
    Ok(LN_2 - (z1 + z2) * (x1 + x2) / 2.0 + log_bessel_k(z1 - z2, arg)?)
}

/// Ψ_{z₁,z₂}(x₁, x₂) = 2e^{−(z₁+z₂)(x₁+x₂)/2} K_{z₁−z₂}(2e^{−(x₁−x₂)/2}).
pub fn psi2(z1: Complex64, z2: Complex64, x1: f64, x2: f64) -> Result<Complex64> {
    Ok(log_psi2(z1, z2, x1, x2)?.exp())
}

/// Dual function Ψ*(x) = e^{−e^{−x₂}}Ψ(x), in log form.
pub fn log_dual_psi2(z1: Complex64, z2: Complex64, x1: f64, x2: f64) -> Result<Complex64> {
    Ok(log_psi2(z1, z2, x1, x2)? - (-x2).exp())
}

/// log of the same-length kernel
/// exp(−αΣ(xᵢ−yᵢ) − Σe^{−(xᵢ−yᵢ)} − Σe^{−(yᵢ−x_{i+1})}).
pub fn log_baxter(alpha: Complex64, x: &[f64], y: &[f64]) -> Result<Complex64> {
    if x.len() != y.len() || x.is_empty() {
        return Err(Error::InvalidArgument(format!("kernel needs equal lengths, got {} and {}", x.len(), y.len())));
    }
    let n = x.len();
    let mut lin = 0.0;
    let mut walls = 0.0;
    for i in 0..n {
        lin += x[i] - y[i];
        walls += (-(x[i] - y[i])).exp();
        if i + 1 < n {
            walls += (-(y[i] - x[i + 1])).exp();
        }
    }
    Ok(-alpha * lin - walls)
}

/// Two-variable Baxter kernel Ψ^{(2)}_α(x/y).
pub fn baxter_kernel(alpha: Complex64, x: [f64; 2], y: [f64; 2]) -> Complex64 {
    log_baxter(alpha, &x, &y).expect("fixed lengths").exp()
}

/// log of the kernel from length n − 1 to length n,
/// exp(−α(Σx − Σy) − Σe^{−(xᵢ−yᵢ)} − Σe^{−(yᵢ−x_{i+1})}).
pub fn log_branch_kernel(alpha: Complex64, x: &[f64], y: &[f64]) -> Result<Complex64> {
    if x.len() != y.len() + 1 {
        return Err(Error::InvalidArgument(format!("branch kernel needs lengths n and n−1, got {} and {}", x.len(), y.len())));
    }
    let lin: f64 = x.iter().sum::<f64>() - y.iter().sum::<f64>();
    let mut walls = 0.0;
    for i in 0..y.len() {
        walls += (-(x[i] - y[i])).exp() + (-(y[i] - x[i + 1])).exp();
    }
    Ok(-alpha * lin - walls)
}

/// Whittaker function by Givental's nested integral over the triangular array.
/// n ≤ 3: n = 2 is a 1D integral, n = 3 a 2D integral of the n = 2 function.
pub fn psi_givental(index: &WhittakerIndex, x: &RealPoint) -> Result<Complex64> {
    let n = index.len();
    if n != x.coords.len() {
        return Err(Error::InvalidArgument(format!("{n} parameters for a point in ℝ^{}", x.coords.len())));
    }
    let a = &index.alphas;
    let xs = &x.coords;
    match n {
        0 => Err(Error::InvalidArgument("empty index".into())),
        1 => Ok((-a[0] * xs[0]).exp()),
        2 => givental2(a[0], a[1], xs[0], xs[1]),
        3 => givental3(a, xs),
        _ => Err(Error::Unsupported(format!("Givental integral in dimension {n}"))),
    }
}

fn givental2(a1: Complex64, a2: Complex64, x1: f64, x2: f64) -> Result<Complex64> {
    let log_f = |y: f64| -> Complex64 {
        log_branch_kernel(a1, &[y], &[]).expect("lengths") + log_branch_kernel(a2, &[x1, x2], &[y]).expect("lengths")
    };
    // The integrand lives between the two walls at y ≈ x₂ and y ≈ x₁.
    let (lo, hi) = (x1.min(x2) - 10.0, x1.max(x2) + 10.0);
    let peak = (0..=400)
        .map(|j| log_f(lo + (hi - lo) * j as f64 / 400.0).re)
        .fold(f64::NEG_INFINITY, f64::max);
    let center = 0.5 * (x1 + x2);
    let r = integrate_real_line(|y| (log_f(y) - peak).exp(), center, 4.0 + 0.5 * (x1 - x2).abs(), 1e-13);
    Ok(r.require("Givental integral (n = 2)")? * peak.exp())
}

fn givental3(a: &[Complex64], x: &[f64]) -> Result<Complex64> {
    // Inner array y ∈ ℝ² in coordinates s = y₁ + y₂, d = y₁ − y₂.
    let (a1, a2, a3) = (a[0], a[1], a[2]);
    let slow = |d: f64| -> Complex64 {
        let arg = 2.0 * (-d / 2.0).exp();
        if !arg.is_finite() {
            return c(f64::NEG_INFINITY);
        }
        log_bessel_k(a1 - a2, arg).unwrap_or(c(f64::NEG_INFINITY)) + LN_2
    };
    let fast = |s: f64, d: f64| -> Complex64 {
        let y = [(s + d) / 2.0, (s - d) / 2.0];
        -(a1 + a2) * s / 2.0 + log_branch_kernel(a3, x, &y).expect("lengths")
    };
    let hint = ((x[0] + 2.0 * x[1] + x[2]) / 2.0, (x[0] - x[2]) / 2.0);
    let opts = PlaneOptions { rel_tol: 1e-9, ..PlaneOptions::default() };
    let r = integrate_plane_split(slow, fast, hint, opts)?;
    Ok(0.5 * r.require("Givental integral (n = 3)")?)
}

/// Skew function Ψ^{(2)}_{α₁,…,α_k}(x/y) by the branching rule, k ≤ 2.
pub fn skew_whittaker(alphas: &[Complex64], x: [f64; 2], y: [f64; 2]) -> Result<Complex64> {
    match alphas.len() {
        1 => Ok(baxter_kernel(alphas[0], x, y)),
        2 => {
            let log_f = |w1: f64, w2: f64| -> Complex64 {
                let w = [w1, w2];
                log_baxter(alphas[0], &w, &y).expect("lengths") + log_baxter(alphas[1], &x, &w).expect("lengths")
            };
            let hint = (0.5 * (x[0] + y[0]), 0.5 * (x[1] + y[1]));
            let opts = PlaneOptions { rel_tol: 1e-10, ..PlaneOptions::default() };
            integrate_plane(log_f, hint, opts)?.require("skew Whittaker convolution")
        }
        k => Err(Error::Unsupported(format!("skew Whittaker function with {k} parameters"))),
    }
}

/// Orthogonality weight Δ(z) = (1/n!)∏_{i≠j} 1/Γ(zᵢ − zⱼ).
pub fn orthogonality_weight(z: &[Complex64]) -> Complex64 {
    let n = z.len();
    let mut w = c(1.0);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                w *= rgamma(z[i] - z[j]);
            }
        }
    }
    let fact: f64 = (1..=n).map(|k| k as f64).product();
    w / fact
}

/// Outcome of a numerical identity check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityGap {
    pub lhs: Complex64,
    pub rhs: Complex64,
    /// |lhs − rhs| / |rhs|.
    pub gap: f64,
    /// Quadrature error estimate for lhs, relative to |rhs|.
    pub error_estimate: f64,
}

impl IdentityGap {
    fn new(lhs: QuadratureResult, scale: f64, rhs: Complex64) -> Self {
        let value = lhs.value * scale;
        IdentityGap {
            lhs: value,
            rhs,
            gap: (value - rhs).norm() / rhs.norm(),
            error_estimate: lhs.error_estimate * scale / rhs.norm(),
        }
    }

    pub fn holds(&self, tol: f64) -> bool {
        self.gap < tol
    }
}

fn log_gamma_sum(args: &[Complex64]) -> Result<Complex64> {
    args.iter().map(|&z| log_gamma(z)).sum()
}

fn require_positive(what: &str, values: &[Complex64]) -> Result<()> {
    if let Some(v) = values.iter().find(|v| !(v.re > 0.0)) {
        return Err(Error::Parameter(format!("{what}: need positive real part, got {v}")));
    }
    Ok(())
}

fn whittaker_plane_opts() -> PlaneOptions {
    PlaneOptions { rel_tol: 1e-10, search_radius: 30.0, log_drop: 46.0, max_nodes: 1 << 23 }
}

/// log of the Bessel factor of Ψ_𝜶 as a function of d = x₁ − x₂.
fn log_bessel_part(a: [Complex64; 2], d: f64) -> Complex64 {
    let arg = 2.0 * (-d / 2.0).exp();
    if !arg.is_finite() || arg == 0.0 {
        return c(f64::NEG_INFINITY);
    }
    LN_2 + log_bessel_k(a[0] - a[1], arg).unwrap_or(c(f64::NEG_INFINITY))
}

/// Cauchy identity ∫ Ψ_𝜶 Ψ*_𝜷 = ∏Γ(αᵢ + βⱼ) for n = 1 (a 1D integral) and n = 2
/// (a plane integral).
pub fn verify_cauchy_whittaker(n: usize, alphas: &[Complex64], betas: &[Complex64]) -> Result<IdentityGap> {
    if alphas.len() != n || betas.len() != n {
        return Err(Error::InvalidArgument(format!("need {n} parameters on each side")));
    }
    let sums: Vec<Complex64> = alphas.iter().flat_map(|a| betas.iter().map(move |b| a + b)).collect();
    require_positive("Cauchy identity", &sums)?;
    let rhs = log_gamma_sum(&sums)?.exp();
    match n {
        1 => {
            let k = sums[0];
            let r = integrate_real_line(|x| (-k * x - (-x).exp()).exp(), 0.0, 8.0, 1e-13);
            if !r.converged {
                return Err(Error::NonConvergence("Cauchy integral (n = 1)".into()));
            }
            Ok(IdentityGap::new(r, 1.0, rhs))
        }
        2 => {
            let (a, b) = ([alphas[0], alphas[1]], [betas[0], betas[1]]);
            let total = a[0] + a[1] + b[0] + b[1];
            let slow = |d: f64| log_bessel_part(a, d) + log_bessel_part(b, d);
            let fast = |s: f64, d: f64| -total * s / 2.0 - (-(s - d) / 2.0).exp();
            let r = integrate_plane_split(slow, fast, (0.0, 0.0), whittaker_plane_opts())?;
            if !r.converged {
                return Err(Error::NonConvergence("Cauchy integral (n = 2)".into()));
            }
            Ok(IdentityGap::new(r, 0.5, rhs))
        }
        _ => Err(Error::Unsupported(format!("Cauchy check for n = {n}"))),
    }
}

/// Littlewood identity
/// ∫ Ψ_𝜶(x)e^{−se^{−x₂}}e^{−u(x₁−x₂)}dx = s^{−α₁−α₂}Γ(α₁+u)Γ(α₂+u)Γ(α₁+α₂).
pub fn verify_littlewood_whittaker(alphas: [Complex64; 2], u: f64, s: f64) -> Result<IdentityGap> {
    if !(s > 0.0) {
        return Err(Error::Parameter(format!("Littlewood identity needs s > 0, got {s}")));
    }
    let args = [alphas[0] + u, alphas[1] + u, alphas[0] + alphas[1]];
    require_positive("Littlewood identity", &args)?;
    let total = alphas[0] + alphas[1];
    let rhs = (log_gamma_sum(&args)? - total * s.ln()).exp();
    let slow = |d: f64| log_bessel_part(alphas, d) - u * d;
    let fast = |sum: f64, d: f64| -total * sum / 2.0 - s * (-(sum - d) / 2.0).exp();
    let r = integrate_plane_split(slow, fast, (0.0, 0.0), whittaker_plane_opts())?;
    if !r.converged {
        return Err(Error::NonConvergence("Littlewood integral".into()));
    }
    Ok(IdentityGap::new(r, 0.5, rhs))
}

/// ∫ Ψ_𝜶 Ψ_𝜷 e^{−se^{−x₂}}e^{−u(x₁−x₂)}dx = s^{−Σ}Γ(Σ)/Γ(Σ+2u)∏Γ(αᵢ+βⱼ+u),
/// Σ = α₁ + α₂ + β₁ + β₂ (the geometric-RSK identity).
pub fn verify_grsk_sum(alphas: [Complex64; 2], betas: [Complex64; 2], u: f64, s: f64) -> Result<IdentityGap> {
    if !(s > 0.0) {
        return Err(Error::Parameter(format!("need s > 0, got {s}")));
    }
    let mut args: Vec<Complex64> = alphas.iter().flat_map(|a| betas.iter().map(move |b| a + b + u)).collect();
    let total = alphas[0] + alphas[1] + betas[0] + betas[1];
    require_positive("geometric RSK identity", &args)?;
    require_positive("geometric RSK identity", &[total])?;
    args.push(total);
    let rhs = (log_gamma_sum(&args)? - log_gamma(total + 2.0 * u)? - total * s.ln()).exp();
    let slow = |d: f64| log_bessel_part(alphas, d) + log_bessel_part(betas, d) - u * d;
    let fast = |sum: f64, d: f64| -total * sum / 2.0 - s * (-(sum - d) / 2.0).exp();
    let r = integrate_plane_split(slow, fast, (0.0, 0.0), whittaker_plane_opts())?;
    if !r.converged {
        return Err(Error::NonConvergence("geometric RSK integral".into()));
    }
    Ok(IdentityGap::new(r, 0.5, rhs))
}

/// One step of the skew Cauchy identity,
/// ∫ Ψ^{(2)}_α(x/y)Ψ_𝐳(x)dx = Ψ_𝐳(y)Γ(α+z₁)Γ(α+z₂).
pub fn verify_skew_cauchy(alpha: Complex64, z: [Complex64; 2], y: [f64; 2]) -> Result<IdentityGap> {
    let args = [alpha + z[0], alpha + z[1]];
    require_positive("skew Cauchy identity", &args)?;
    let rhs = (log_psi2(z[0], z[1], y[0], y[1])? + log_gamma_sum(&args)?).exp();
    let slow = |d: f64| log_bessel_part(z, d);
    let fast = |s: f64, d: f64| {
        let x = [(s + d) / 2.0, (s - d) / 2.0];
        -(z[0] + z[1]) * s / 2.0 + log_baxter(alpha, &x, &y).expect("lengths")
    };
    let hint = (y[0] + y[1], y[0] - y[1]);
    let r = integrate_plane_split(slow, fast, hint, whittaker_plane_opts())?;
    if !r.converged {
        return Err(Error::NonConvergence("skew Cauchy integral".into()));
    }
    Ok(IdentityGap::new(r, 0.5, rhs))
}

/// Inverse Mellin pair ∫_{η+iℝ} Γ(α+z) t^z dz/(2πi) = t^{−α}e^{−1/t}, with t = e^{d}.
pub fn verify_mellin_n1(alpha: Complex64, d: f64, eta: f64) -> Result<IdentityGap> {
    if !((alpha + eta).re > 0.0) {
        return Err(Error::Parameter(format!("contour must sit right of the poles: Re(α + η) = {}", (alpha + eta).re)));
    }
    let t = d.exp();
    let rhs = (-alpha * d - 1.0 / t).exp();
    let spec = ContourSpec::vertical(eta).with_tol(1e-13);
    let r = integrate_vertical(
        |z| (log_gamma(alpha + z).unwrap_or(c(f64::NEG_INFINITY)) + z * d).exp(),
        &spec,
        std::f64::consts::FRAC_PI_2,
    )?;
    if !r.converged {
        return Err(Error::NonConvergence("Mellin integral".into()));
    }
    Ok(IdentityGap::new(r, 1.0, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::bessel_k;

    fn ci(im: f64) -> Complex64 {
        Complex64::new(0.0, im)
    }

    #[test]
    fn psi2_at_the_origin() {
        // 2K₀(2), K₀(2) = 0.11389387274953344.
        let v = psi2(c(0.0), c(0.0), 0.0, 0.0).unwrap();
        assert!((v.re - 2.0 * 0.113_893_872_749_533_44).abs() < 1e-14);
        let w = psi2(c(0.0), c(0.0), 1.7, 0.0).unwrap();
        let k0 = bessel_k(c(0.0), 2.0 * (-0.85f64).exp()).unwrap();
        assert!((w - 2.0 * k0).norm() < 1e-14);
    }

    #[test]
    fn psi2_symmetric_in_parameters() {
        let (a, b) = (Complex64::new(0.4, 0.2), Complex64::new(-0.3, 1.1));
        let p = psi2(a, b, 0.7, -1.2).unwrap();
        let q = psi2(b, a, 0.7, -1.2).unwrap();
        assert!((p - q).norm() < 1e-13 * p.norm());
    }

    #[test]
    fn givental_two_matches_bessel() {
        let z = ci(0.3);
        let g = psi_givental(&WhittakerIndex::new(vec![z, -z]).unwrap(), &RealPoint::new(vec![1.0, 0.0]).unwrap()).unwrap();
        let b = 2.0 * bessel_k(2.0 * z, 2.0 * (-0.5f64).exp()).unwrap();
        assert!((g - b).norm() < 1e-8 * b.norm(), "{g} {b}");
        let idx = WhittakerIndex::real(&[0.4, 0.1]).unwrap();
        let x = RealPoint::new(vec![0.3, -0.3]).unwrap();
        let g = psi_givental(&idx, &x).unwrap();
        let p = psi2(c(0.4), c(0.1), 0.3, -0.3).unwrap();
        assert!((g - p).norm() < 1e-8 * p.norm());
        let swapped = psi_givental(&WhittakerIndex::real(&[0.1, 0.4]).unwrap(), &x).unwrap();
        assert!((g - swapped).norm() < 1e-8 * g.norm());
    }

    #[test]
    fn givental_one_is_exponential() {
        let v = psi_givental(&WhittakerIndex::real(&[0.7]).unwrap(), &RealPoint::new(vec![2.0]).unwrap()).unwrap();
        assert!((v.re - (-1.4f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn givental_three_is_symmetric() {
        let x = RealPoint::new(vec![0.8, 0.1, -0.6]).unwrap();
        let a = psi_givental(&WhittakerIndex::real(&[0.5, 0.2, 0.9]).unwrap(), &x).unwrap();
        let b = psi_givental(&WhittakerIndex::real(&[0.9, 0.5, 0.2]).unwrap(), &x).unwrap();
        assert!((a - b).norm() < 1e-5 * a.norm(), "{a} {b}");
    }

    #[test]
    fn baxter_kernel_values() {
        let v = baxter_kernel(c(1.0), [0.0, 0.0], [0.0, 0.0]);
        assert!((v.re - (-3.0f64).exp()).abs() < 1e-16);
        // Pushing x₂ up by 10 costs e^{−10α} up to the vanishing wall terms.
        let y = [0.0, -20.0];
        let base = baxter_kernel(c(1.0), [5.0, -15.0], y);
        let moved = baxter_kernel(c(1.0), [5.0, -5.0], y);
        let ratio = (moved / base).re;
        assert!((ratio / (-10.0f64).exp() - 1.0).abs() < 1e-3, "{ratio}");
    }

    #[test]
    fn skew_whittaker_reduces_and_is_symmetric() {
        let x = [0.4, -0.2];
        let y = [0.1, -0.5];
        let one = skew_whittaker(&[c(1.3)], x, y).unwrap();
        assert_eq!(one, baxter_kernel(c(1.3), x, y));
        let a = skew_whittaker(&[c(1.3), c(0.6)], x, y).unwrap();
        let b = skew_whittaker(&[c(0.6), c(1.3)], x, y).unwrap();
        assert!((a - b).norm() < 1e-8 * a.norm(), "{a} {b}");
        // Equal parameters at x = y against a finer rule.
        let d = skew_whittaker(&[c(1.0), c(1.0)], y, y).unwrap();
        let fine = integrate_plane(
            |w1, w2| {
                let w = [w1, w2];
                log_baxter(c(1.0), &w, &y).unwrap() + log_baxter(c(1.0), &y, &w).unwrap()
            },
            (0.0, 0.0),
            PlaneOptions { rel_tol: 1e-12, ..PlaneOptions::default() },
        )
        .unwrap()
        .value;
        assert!((d - fine).norm() < 1e-6 * fine.norm());
    }

    #[test]
    fn skew_cauchy_step() {
        let r = verify_skew_cauchy(c(2.0), [ci(0.2), ci(-0.2)], [0.5, -0.5]).unwrap();
        assert!(r.holds(1e-6), "{r:?}");
    }

    #[test]
    fn cauchy_identities() {
        let r = verify_cauchy_whittaker(1, &[c(1.0)], &[c(1.0)]).unwrap();
        assert!((r.rhs.re - 1.0).abs() < 1e-15);
        assert!(r.holds(1e-10), "{r:?}");
        let a = [c(0.8), c(1.2)];
        let b = [c(0.9), c(1.1)];
        let r = verify_cauchy_whittaker(2, &a, &b).unwrap();
        assert!(r.holds(1e-6), "{r:?}");
        let swapped = verify_cauchy_whittaker(2, &b, &a).unwrap();
        assert!((swapped.rhs - r.rhs).norm() < 1e-14 * r.rhs.norm());
        assert!((swapped.lhs - r.lhs).norm() < 1e-6 * r.rhs.norm());
        assert!(verify_cauchy_whittaker(2, &[c(-1.0), c(0.5)], &b).is_err());
    }

    #[test]
    fn littlewood_identity_and_scaling() {
        let a = [c(1.0), c(1.5)];
        let r = verify_littlewood_whittaker(a, 0.5, 1.0).unwrap();
        assert!(r.holds(1e-6), "{r:?}");
        let r2 = verify_littlewood_whittaker(a, 0.5, 2.0).unwrap();
        let ratio = r2.lhs / r.lhs;
        assert!((ratio.re - 2f64.powf(-2.5)).abs() < 1e-6);
        let up = verify_littlewood_whittaker(a, 1.5, 1.0).unwrap();
        assert!(((up.rhs / r.rhs).re - 1.5 * 2.0).abs() < 1e-12);
    }

    #[test]
    fn grsk_identity() {
        let r = verify_grsk_sum([c(0.8), c(1.1)], [c(0.7), c(1.3)], 0.4, 1.0).unwrap();
        assert!(r.holds(1e-6), "{r:?}");
        let zero = verify_grsk_sum([c(0.8), c(1.1)], [c(0.7), c(1.3)], 0.0, 1.0).unwrap();
        let plain: Complex64 = [1.5, 2.1, 1.8, 2.4].iter().map(|&v| crate::numerics::gamma(c(v)).unwrap()).product();
        assert!((zero.rhs - plain).norm() < 1e-12 * plain.norm());
        assert!(zero.holds(1e-6));
        let scaled = verify_grsk_sum([c(0.8), c(1.1)], [c(0.7), c(1.3)], 0.4, 1.7).unwrap();
        assert!(((scaled.rhs / r.rhs).re - 1.7f64.powf(-3.9)).abs() < 1e-12);
    }

    #[test]
    fn mellin_pair() {
        let r = verify_mellin_n1(c(1.0), 0.0, 0.0).unwrap();
        assert!((r.rhs.re - (-1.0f64).exp()).abs() < 1e-15);
        assert!(r.holds(1e-9), "{r:?}");
        let d = 0.7f64.ln();
        let a = verify_mellin_n1(c(2.5), d, 0.0).unwrap();
        let b = verify_mellin_n1(c(2.5), d, 0.3).unwrap();
        assert!(a.holds(1e-9) && b.holds(1e-9), "{a:?} {b:?}");
        assert!((a.lhs - b.lhs).norm() < 1e-10 * a.rhs.norm());
    }

    #[test]
    fn weight_is_even() {
        let z = [ci(0.4), ci(-1.3)];
        let a = orthogonality_weight(&z);
        let b = orthogonality_weight(&[z[1], z[0]]);
        assert!((a - b).norm() < 1e-14 * a.norm());
        assert!(a.im.abs() < 1e-14 * a.norm());
    }

    #[test]
    fn doubly_exponential_decay_outside_the_chamber() {
        // log|Ψ_z(x)| ≈ −2e^{−d/2} as d = x₁ − x₂ → −∞.
        let z = ci(0.7);
        let at = |d: f64| log_psi2(z, -z, d / 2.0, -d / 2.0).unwrap().re;
        for &d in &[-6.0, -10.0, -14.0] {
            let slope = (at(d - 0.01) - at(d + 0.01)) / 0.02;
            let expect = -(-d / 2.0f64).exp();
            assert!((slope / expect - 1.0).abs() < 0.05, "d={d}: {slope} vs {expect}");
        }
    }
}
