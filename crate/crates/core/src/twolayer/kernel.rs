use super::density::{log_baxter2, log_skew_one};
use super::doob::{GeoDoob, LgDoob};
use super::params::{GeoParams, LgParams, Step};
use crate::error::{Error, Result};
use crate::numerics::gamma::log_gamma_unchecked;
use crate::numerics::log_bessel_k_real;
use crate::schur::{skew_schur_generic, Signature};
use crate::whittaker::skew_whittaker;
use crate::Complex64;

fn check_span(x: usize, y: usize, n: usize) -> Result<()> {
    if !(x < y && y <= n) {
        return Err(Error::InvalidArgument(format!("transition {x} -> {y} with N = {n}")));
    }
    Ok(())
}

fn check_pair(s: &Signature) -> Result<()> {
    if s.len() != 2 {
        return Err(Error::InvalidArgument(format!("two-part signature expected, got {:?}", s.parts())));
    }
    Ok(())
}

fn log_gamma_sq(alpha: f64) -> f64 {
    2.0 * log_gamma_unchecked(Complex64::new(alpha, 0.0)).re
}

/// Transition probability from λ at site x to μ at site y:
/// ∏(1 − aᵢ)² s_{μ/λ}(a_{x+1}, …, a_y) h_y(μ₁ − μ₂)/h_x(λ₁ − λ₂).
pub fn kernel_geo(doob: &GeoDoob, x: usize, y: usize, lambda: &Signature, mu: &Signature) -> Result<f64> {
    check_span(x, y, doob.n())?;
    check_pair(lambda)?;
    check_pair(mu)?;
    let a = &doob.params().a[x..y];
    let s: f64 = skew_schur_generic(mu, lambda, a)?;
    if s == 0.0 {
        return Ok(0.0);
    }
    let bulk: f64 = a.iter().map(|a| (1.0 - a) * (1.0 - a)).product();
    Ok(bulk * s * doob.h(y, mu.gap())? / doob.h(x, lambda.gap())?)
}

/// One step of the chain along a down-right path, from λ at site x − 1 to μ
/// at site x. A Right letter uses s_{μ/λ}(a_x), a Down letter s_{λ/μ}(a_x);
/// the Doob factor is the same.
pub fn kernel_word_step_geo(doob: &GeoDoob, x: usize, step: Step, lambda: [i64; 2], mu: [i64; 2]) -> Result<f64> {
    if x == 0 || x > doob.n() {
        return Err(Error::InvalidArgument(format!("step index {x} outside 1..={}", doob.n())));
    }
    if lambda[0] < lambda[1] || mu[0] < mu[1] {
        return Ok(0.0);
    }
    let a = doob.params().a[x - 1];
    let ls = match step {
        Step::Right => log_skew_one(lambda, mu, a),
        Step::Down => log_skew_one(mu, lambda, a),
    };
    if ls == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    let ratio = doob.h(x, mu[0] - mu[1])? / doob.h(x - 1, lambda[0] - lambda[1])?;
    Ok((1.0 - a) * (1.0 - a) * ls.exp() * ratio)
}

/// Transition density from λ at site x to μ at site y:
/// ∏Γ(αᵢ)^{−2} Ψ_{α_{x+1},…,α_y}(μ/λ) H_y(μ₁ − μ₂)/H_x(λ₁ − λ₂).
/// The skew function is available for y − x ≤ 2.
pub fn kernel_lg(doob: &LgDoob, x: usize, y: usize, lambda: [f64; 2], mu: [f64; 2]) -> Result<f64> {
    check_span(x, y, doob.n())?;
    let alphas = &doob.params().alphas[x..y];
    let norm: f64 = alphas.iter().map(|&a| log_gamma_sq(a)).sum();
    let psi = if alphas.len() == 1 {
        log_baxter2(alphas[0], mu, lambda).exp()
    } else {
        let z: Vec<Complex64> = alphas.iter().map(|&a| Complex64::new(a, 0.0)).collect();
        skew_whittaker(&z, mu, lambda)?.re
    };
    let ratio = doob.h(y, mu[0] - mu[1])? / doob.h(x, lambda[0] - lambda[1])?;
    Ok(psi * (-norm).exp() * ratio)
}

/// Log-gamma analogue of [`kernel_word_step_geo`] with Ψ_α(μ/λ) for Right
/// and Ψ_α(λ/μ) for Down.
pub fn kernel_word_step_lg(doob: &LgDoob, x: usize, step: Step, lambda: [f64; 2], mu: [f64; 2]) -> Result<f64> {
    if x == 0 || x > doob.n() {
        return Err(Error::InvalidArgument(format!("step index {x} outside 1..={}", doob.n())));
    }
    let alpha = doob.params().alphas[x - 1];
    let lp = match step {
        Step::Right => log_baxter2(alpha, mu, lambda),
        Step::Down => log_baxter2(alpha, lambda, mu),
    };
    let ratio = doob.h(x, mu[0] - mu[1])? / doob.h(x - 1, lambda[0] - lambda[1])?;
    Ok((lp - log_gamma_sq(alpha)).exp() * ratio)
}

fn homogeneous_rate(params: &GeoParams) -> Result<f64> {
    if params.a.is_empty() || !params.is_homogeneous() {
        return Err(Error::Parameter("the limit kernel needs N >= 1 equal bulk rates".into()));
    }
    Ok(params.a[0])
}

/// N → ∞ kernel of the homogeneous geometric chain (the chain conditioned
/// to keep a nonnegative gap forever): (1 − a)² s_{μ/λ}(a) (g(μ) + 1)/(g(λ) + 1).
pub fn limit_kernel_geo(lambda: [i64; 2], mu: [i64; 2], params: &GeoParams) -> Result<f64> {
    params.validate()?;
    let a = homogeneous_rate(params)?;
    if lambda[0] < lambda[1] || mu[0] < mu[1] {
        return Ok(0.0);
    }
    let ls = log_skew_one(lambda, mu, a);
    if ls == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    let ratio = (mu[0] - mu[1] + 1) as f64 / (lambda[0] - lambda[1] + 1) as f64;
    Ok((1.0 - a) * (1.0 - a) * ls.exp() * ratio)
}

/// N → ∞ kernel of the homogeneous log-gamma chain:
/// Γ(α)^{−2} Ψ_α(μ/λ) K₀(2e^{−g(μ)/2})/K₀(2e^{−g(λ)/2}).
pub fn limit_kernel_lg(lambda: [f64; 2], mu: [f64; 2], params: &LgParams) -> Result<f64> {
    params.validate()?;
    if params.alphas.is_empty() || !params.is_homogeneous() {
        return Err(Error::Parameter("the limit kernel needs N >= 1 equal shapes".into()));
    }
    let alpha = params.alphas[0];
    let k0 = |g: f64| log_bessel_k_real(0.0, 2.0 * (-0.5 * g).exp());
    let lp = log_baxter2(alpha, mu, lambda) - log_gamma_sq(alpha) + k0(mu[0] - mu[1])? - k0(lambda[0] - lambda[1])?;
    Ok(lp.exp())
}
