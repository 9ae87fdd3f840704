use num_complex::Complex64;
use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

const MAX_HALVINGS: usize = 16;
// Integrand magnitudes below exp(peak − CUTOFF) are dropped.
const CUTOFF: f64 = 46.0;

/// Modified Bessel function of the second kind K_ν(x) for complex order and
/// real positive argument.
///
/// Uses K_ν(x) = ½∫_ℝ exp(−x cosh t + νt) dt on the shifted line t + iβ.
/// For orders with a large imaginary part the shift β → ±π/2 removes most of
/// the cancellation (|K_{iμ}(x)| ~ e^{−π|μ|/2}), so the result keeps relative
/// accuracy where the plain real-line rule would only give absolute accuracy.
pub fn bessel_k(order: Complex64, x: f64) -> Result<Complex64> {
    let (v, offset) = bessel_k_scaled(order, x)?;
    Ok(v * offset.exp())
}

/// log K_ν(x) (principal branch of the complex log); stays finite where
/// K itself under- or overflows.
pub fn log_bessel_k(order: Complex64, x: f64) -> Result<Complex64> {
    if x > ASYMPTOTIC_MIN_ARG && order.norm_sqr() < x / 50.0 {
        return Ok(log_bessel_k_large(order, x));
    }
    let (v, offset) = bessel_k_scaled(order, x)?;
    Ok(v.ln() + offset)
}

/// log K_ν(x) for real order and x > 0, by the trapezoid rule on
/// K_ν(x) = ∫_0^∞ e^{−x cosh t} cosh(νt) dt. The integrand is analytic in
/// |Im t| < π/2; the step shrinks with the peak width 1/√x and keeps about
/// 20 digits. Much cheaper than the complex-order routine.
pub fn log_bessel_k_real(order: f64, x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() || !order.is_finite() {
        return Err(Error::InvalidArgument(format!("bessel_k({order}, {x})")));
    }
    let step = (0.4 / x.sqrt()).min(0.2);
    let nu = order.abs();
    let exponent = |t: f64| -x * t.cosh() + nu * t + (0.5 * (1.0 + (-2.0 * nu * t).exp())).ln();
    let peak = exponent((nu / x).asinh());
    let mut sum = 0.5 * (exponent(0.0) - peak).exp();
    let mut k = 1usize;
    loop {
        let t = k as f64 * step;
        let e = exponent(t) - peak;
        sum += e.exp();
        if e < -CUTOFF && x * t.sinh() > nu {
            break;
        }
        k += 1;
    }
    Ok(peak + (step * sum).ln())
}

const ASYMPTOTIC_MIN_ARG: f64 = 500.0;

/// Hankel expansion K_ν(x) ~ √(π/2x) e^{−x} Σ_k a_k(ν)/x^k, used for x ≫ |ν|².
fn log_bessel_k_large(order: Complex64, x: f64) -> Complex64 {
    let four_nu2 = 4.0 * order * order;
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for k in 1..30 {
        let odd = (2 * k - 1) as f64;
        term *= (four_nu2 - odd * odd) / (k as f64 * 8.0 * x);
        sum += term;
        if term.norm() < 1e-17 * sum.norm() {
            break;
        }
    }
    0.5 * (std::f64::consts::PI / (2.0 * x)).ln() - x + sum.ln()
}

/// K_ν(x) = v·e^{offset}.
fn bessel_k_scaled(order: Complex64, x: f64) -> Result<(Complex64, f64)> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::InvalidArgument(format!("bessel_k needs x > 0, got {x}")));
    }
    if !order.re.is_finite() || !order.im.is_finite() {
        return Err(Error::InvalidArgument(format!("bessel_k order {order}")));
    }
    // K is even in the order; work with Re ν ≥ 0.
    let nu = if order.re < 0.0 { -order } else { order };
    let mu = nu.im;
    let beta = if mu.abs() > 4.0 / std::f64::consts::PI {
        mu.signum() * (FRAC_PI_2 - 2.0 / mu.abs()).max(0.0)
    } else {
        0.0
    };
    let cb = beta.cos();

    // Real part of the exponent along the line: −x cosβ cosh t + Re ν t − Im ν β.
    let log_mag = |t: f64| -x * cb * t.cosh() + nu.re * t;
    let t_peak = (nu.re / (x * cb)).asinh();
    let peak = log_mag(t_peak);
    let mut lo = t_peak;
    while peak - log_mag(lo) < CUTOFF {
        lo -= 0.5;
    }
    let mut hi = t_peak;
    while peak - log_mag(hi) < CUTOFF {
        hi += 0.5;
    }

    // Exponent relative to the peak magnitude to avoid overflow.
    let offset = peak - mu * beta;
    let shift = Complex64::new(0.0, beta);
    let integrand = |t: f64| -> Complex64 {
        let tc = Complex64::new(t, 0.0) + shift;
        (-x * tc.cosh() + nu * tc - offset).exp()
    };

    let mut h = 0.25f64.min((hi - lo) / 16.0);
    if mu.abs() > 1.0 {
        h = h.min(1.0 / mu.abs());
    }
    let n0 = ((hi - lo) / h).ceil() as usize;
    h = (hi - lo) / n0 as f64;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut abs_sum = 0.0;
    for j in 0..=n0 {
        let v = integrand(lo + j as f64 * h);
        let w = if j == 0 || j == n0 { 0.5 } else { 1.0 };
        sum += w * v;
        abs_sum += w * v.norm();
    }
    let mut estimate = sum * h;
    let mut n = n0;
    for _ in 0..MAX_HALVINGS {
        let mut mid = Complex64::new(0.0, 0.0);
        for j in 0..n {
            let v = integrand(lo + (j as f64 + 0.5) * h);
            mid += v;
            abs_sum += v.norm();
        }
        sum += mid;
        h *= 0.5;
        n *= 2;
        let next = sum * h;
        let change = (next - estimate).norm();
        estimate = next;
        let floor = 1e-15 * abs_sum * h;
        if change <= 1e-14 * estimate.norm() || change <= floor {
            return Ok((0.5 * estimate, offset));
        }
    }
    Err(Error::NonConvergence(format!("bessel_k({order}, {x})")))
}
