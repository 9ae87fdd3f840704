use num_complex::Complex64;
use serde::Serialize;

use super::gamma::log_gamma_unchecked;
use super::quadrature::{integrate_circle, integrate_vertical, ContourSpec};
use crate::error::{Error, Result};

/// Singular factors closer than this are treated as colliding.
pub const EPS_COLLISION: f64 = 1e-8;
/// Radius of the fallback circle around clustered poles.
pub const FALLBACK_RADIUS: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Position {
    Numerator,
    Denominator,
}

/// Γ(shift + slope·z)^{±1}.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GammaFactor {
    pub shift: Complex64,
    pub slope: i32,
    pub position: Position,
}

impl GammaFactor {
    pub fn num(shift: f64, slope: i32) -> Self {
        GammaFactor { shift: Complex64::new(shift, 0.0), slope, position: Position::Numerator }
    }

    pub fn den(shift: f64, slope: i32) -> Self {
        GammaFactor { shift: Complex64::new(shift, 0.0), slope, position: Position::Denominator }
    }

    pub fn argument(&self, z: Complex64) -> Complex64 {
        self.shift + self.slope as f64 * z
    }

    /// Index i ≥ 0 with argument(z) = −i, if z sits on a pole (within `tol`).
    pub fn pole_index(&self, z: Complex64, tol: f64) -> Option<u64> {
        let w = self.argument(z);
        let i = (-w.re).round();
        if i >= 0.0 && (w + i).norm() < tol {
            Some(i as u64)
        } else {
            None
        }
    }

    /// Poles (in z) of this factor, i.e. z with shift + slope·z = −i, i < count.
    pub fn poles(&self, count: usize) -> Vec<Complex64> {
        (0..count)
            .map(|i| (-(i as f64) - self.shift) / self.slope as f64)
            .collect()
    }

    pub fn log_value(&self, z: Complex64) -> Complex64 {
        let lg = log_gamma_unchecked(self.argument(z));
        match self.position {
            Position::Numerator => lg,
            Position::Denominator => -lg,
        }
    }
}

fn factorial_ln(i: u64) -> f64 {
    (1..=i).map(|k| (k as f64).ln()).sum()
}

/// Product of the factors at a regular point.
pub fn gamma_product(factors: &[GammaFactor], z: Complex64) -> Complex64 {
    factors.iter().map(|f| f.log_value(z)).sum::<Complex64>().exp()
}

/// Residue of extra(z)·∏Γ(shift_j + s_j z)^{±1} at a simple pole of exactly
/// one numerator factor. Uses Res_{w=−i}Γ(w) = (−1)^i/i!, divided by the slope.
pub fn gamma_product_residue<E>(factors: &[GammaFactor], extra: E, pole: Complex64) -> Result<Complex64>
where
    E: Fn(Complex64) -> Complex64,
{
    let mut singular: Option<(usize, u64)> = None;
    for (j, f) in factors.iter().enumerate() {
        if let Some(i) = f.pole_index(pole, EPS_COLLISION) {
            match f.position {
                // 1/Γ vanishes there and cancels the pole.
                Position::Denominator => return Ok(Complex64::new(0.0, 0.0)),
                Position::Numerator => {
                    if singular.is_some() {
                        return Err(Error::Collision(pole));
                    }
                    singular = Some((j, i));
                }
            }
        }
    }
    let (j, i) = singular
        .ok_or_else(|| Error::InvalidArgument(format!("{pole} is not a pole of any factor")))?;
    let slope = factors[j].slope as f64;
    let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
    let mut log_rest = Complex64::new(-factorial_ln(i), 0.0);
    for (k, f) in factors.iter().enumerate() {
        if k != j {
            log_rest += f.log_value(pole);
        }
    }
    Ok(extra(pole) * sign / slope * log_rest.exp())
}

/// (1/2πi)∮ F around `center`; the fallback for clustered poles.
pub fn residue_by_circle<F>(f: F, center: Complex64, radius: f64) -> Result<Complex64>
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    let spec = ContourSpec::circle_at(center, radius).with_tol(1e-12);
    integrate_circle(f, &spec)?.require("small-circle residue")
}

/// Residue at `pole`, falling back to circle quadrature on a collision.
pub fn residue_with_fallback<E>(factors: &[GammaFactor], extra: E, pole: Complex64) -> Result<Complex64>
where
    E: Fn(Complex64) -> Complex64 + Sync,
{
    match gamma_product_residue(factors, &extra, pole) {
        Err(Error::Collision(_)) => {
            let f = |z: Complex64| extra(z) * gamma_product(factors, z);
            residue_by_circle(f, pole, FALLBACK_RADIUS)
        }
        other => other,
    }
}

/// A residue added (sign +1) or removed (sign −1) when a line integral is
/// continued past a pole.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Crossing {
    pub pole: f64,
    pub sign: f64,
    pub residue: Complex64,
}

/// Distance a continuation line keeps from every real pole.
const LINE_CLEARANCE: f64 = 0.05;

/// Real poles of the numerator factors, tagged with the side they belong
/// to: Γ(w + z) poles to the left of the line, Γ(w − z) poles to the right.
fn real_poles(factors: &[GammaFactor], reach: f64) -> Vec<(f64, bool)> {
    let mut out = Vec::new();
    for f in factors.iter().filter(|f| f.position == Position::Numerator && f.shift.im == 0.0) {
        // Poles move away from the origin side they belong to as i grows.
        for i in 0.. {
            let p = (-(i as f64) - f.shift.re) / f.slope as f64;
            if p.abs() > reach && (p < 0.0) == (f.slope > 0) {
                break;
            }
            out.push((p, f.slope > 0));
        }
    }
    out
}

/// Singularity order of the product at `z` (numerator hits minus
/// denominator hits).
fn pole_order(factors: &[GammaFactor], z: Complex64) -> i32 {
    factors
        .iter()
        .filter(|f| f.pole_index(z, EPS_COLLISION).is_some())
        .map(|f| if f.position == Position::Numerator { 1 } else { -1 })
        .sum()
}

/// Residue of extra·∏Γ^{±1} at a real point, zero where the denominator
/// cancels the numerator poles.
fn residue_at<E>(factors: &[GammaFactor], extra: &E, pole: f64) -> Result<Complex64>
where
    E: Fn(Complex64) -> Complex64 + Sync,
{
    let z = Complex64::new(pole, 0.0);
    let hits = factors.iter().filter(|f| f.pole_index(z, EPS_COLLISION).is_some()).count();
    match pole_order(factors, z) {
        o if o <= 0 => Ok(Complex64::new(0.0, 0.0)),
        1 if hits == 1 => gamma_product_residue(factors, extra, z),
        _ => {
            let f = |w: Complex64| extra(w) * gamma_product(factors, w);
            residue_by_circle(f, z, clear_radius(factors, z))
        }
    }
}

/// Circle radius around `z` that keeps every other pole or zero of the
/// factors outside: half the distance to the nearest one, capped at
/// [`FALLBACK_RADIUS`].
fn clear_radius(factors: &[GammaFactor], z: Complex64) -> f64 {
    let mut r = FALLBACK_RADIUS;
    for f in factors {
        let w = f.argument(z);
        let centre = (-w.re).round().max(0.0);
        for i in [centre - 1.0, centre, centre + 1.0] {
            if i < 0.0 {
                continue;
            }
            let d = ((w + i) / f.slope as f64).norm();
            if d >= EPS_COLLISION {
                r = r.min(0.5 * d);
            }
        }
    }
    r
}

/// ∫ extra(z)·∏Γ(shift + slope·z)^{±1} dz/(2πi) along a vertical line, as
/// the analytic continuation from the regime where every numerator shift is
/// positive and the line is iℝ.
///
/// The integral is taken on a line Re z = σ near `preferred` that keeps
/// clear of the real poles; every pole on the wrong side of it is corrected
/// by its residue (+ for left poles now to the right, − for right poles now
/// to the left). Numerator slopes must be ±1 and `extra` must be analytic
/// near the crossed poles. A left and a right pole meeting is a pinch and
/// is reported as a collision.
pub fn continued_line_integral<E>(
    factors: &[GammaFactor],
    extra: E,
    preferred: f64,
    decay_rate: f64,
    rel_tol: f64,
) -> Result<(Complex64, Vec<Crossing>)>
where
    E: Fn(Complex64) -> Complex64 + Sync,
{
    if factors.iter().any(|f| f.position == Position::Numerator && f.slope.abs() != 1) {
        return Err(Error::Unsupported("continuation needs numerator slopes ±1".into()));
    }
    let reach = preferred.abs()
        + 1.0
        + factors.iter().map(|f| f.shift.re.abs()).fold(0.0, f64::max);
    let poles = real_poles(factors, reach);
    let sigma = [0.0, 0.1, -0.1, 0.2, -0.2, 0.3, -0.3, 0.05, -0.05, 0.15, -0.15]
        .iter()
        .map(|d| preferred + d)
        .find(|s| poles.iter().all(|(p, _)| (p - s).abs() >= LINE_CLEARANCE))
        .ok_or_else(|| Error::Collision(Complex64::new(preferred, 0.0)))?;
    let mut crossed: Vec<(f64, f64)> = Vec::new();
    for &(p, left) in &poles {
        let sign = match (left, p > sigma) {
            (true, true) => 1.0,
            (false, false) => -1.0,
            _ => continue,
        };
        if let Some(&(_, s)) = crossed.iter().find(|(q, _)| (q - p).abs() < EPS_COLLISION) {
            if s != sign {
                return Err(Error::Collision(Complex64::new(p, 0.0)));
            }
            continue;
        }
        // A crossed pole sitting on a pole that stayed on its own side pinches the contour.
        let z = Complex64::new(p, 0.0);
        let pinched = poles.iter().any(|&(q, l)| (q - p).abs() < EPS_COLLISION && l != left);
        if pinched && pole_order(factors, z) > 0 {
            return Err(Error::Collision(z));
        }
        crossed.push((p, sign));
    }
    let f = |z: Complex64| {
        let v = extra(z) * gamma_product(factors, z);
        if v.re.is_finite() && v.im.is_finite() {
            v
        } else {
            Complex64::new(0.0, 0.0)
        }
    };
    let spec = ContourSpec::vertical(sigma).with_tol(rel_tol);
    let mut total = integrate_vertical(f, &spec, decay_rate)?.require("continued line integral")?;
    let mut out = Vec::with_capacity(crossed.len());
    for (p, sign) in crossed {
        let r = residue_at(factors, &extra, p)?;
        total += sign * r;
        out.push(Crossing { pole: p, sign, residue: r });
    }
    Ok((total, out))
}

/// Parameter step of [`across_collision`].
const COLLISION_STEP: f64 = 1e-4;

/// f(0), or, when f(0) hits a pole collision, its value from symmetric
/// evaluations at ±δ and ±2δ (Richardson, error O(δ⁴)). `f` must be smooth
/// in s away from s = 0; callers move their parameters along a line.
pub fn across_collision<F>(f: F) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    match f(0.0) {
        Err(Error::Collision(_)) => {
            let d = COLLISION_STEP;
            let near = 0.5 * (f(d)? + f(-d)?);
            let far = 0.5 * (f(2.0 * d)? + f(-2.0 * d)?);
            Ok((4.0 * near - far) / 3.0)
        }
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn first_poles() {
        let u = 0.37;
        let g = |z: Complex64| (z * z).exp() + 2.0;
        let fac = [GammaFactor::num(u, 1)];
        let r0 = gamma_product_residue(&fac, g, c(-u)).unwrap();
        assert!((r0 - g(c(-u))).norm() < 1e-15);
        let r1 = gamma_product_residue(&fac, g, c(-u - 1.0)).unwrap();
        assert!((r1 + g(c(-u - 1.0))).norm() < 1e-14);
    }

    #[test]
    fn slope_two_and_negative_slope() {
        // Γ(u − z) at z = u + 2: argument −2, residue of Γ(u−z) is −(1/2!)·1 ... sign from slope.
        let u = 0.2;
        let fac = [GammaFactor::num(u, -1), GammaFactor::num(1.3, 1)];
        let pole = c(u + 2.0);
        let analytic = gamma_product_residue(&fac, |_| c(1.0), pole).unwrap();
        let numeric = residue_by_circle(|z| gamma_product(&fac, z), pole, 1e-3).unwrap();
        assert!((analytic - numeric).norm() < 1e-10 * analytic.norm());
        let fac2 = [GammaFactor::num(0.4, 2), GammaFactor::den(0.1, 1)];
        let pole2 = c(-(0.4 + 3.0) / 2.0);
        let a2 = gamma_product_residue(&fac2, |z| z.exp(), pole2).unwrap();
        let n2 = residue_by_circle(|z| z.exp() * gamma_product(&fac2, z), pole2, 1e-3).unwrap();
        assert!((a2 - n2).norm() < 1e-10 * a2.norm());
    }

    #[test]
    fn collision_detected_and_resolved() {
        let fac = [GammaFactor::num(0.5, 1), GammaFactor::num(0.5, 1)];
        assert!(matches!(
            gamma_product_residue(&fac, |_| c(1.0), c(-0.5)),
            Err(Error::Collision(_))
        ));
        // Γ(z+1/2)² has a double pole; residue = ψ(1)·... computed by the fallback:
        // Γ(w)² near w=0: 1/w² − 2γ/w, so the residue is −2γ.
        let r = residue_with_fallback(&fac, |_| c(1.0), c(-0.5)).unwrap();
        assert!((r.re + 2.0 * 0.577_215_664_901_532_9).abs() < 1e-9, "{r}");
    }

    #[test]
    fn denominator_cancels_pole() {
        let fac = [GammaFactor::num(0.0, 1), GammaFactor::den(0.0, 1)];
        assert_eq!(gamma_product_residue(&fac, |_| c(1.0), c(-2.0)).unwrap(), c(0.0));
    }

    fn wilson_factors(u: f64, v: f64, alphas: &[f64]) -> Vec<GammaFactor> {
        let mut f = vec![GammaFactor::den(0.0, 2), GammaFactor::den(0.0, -2)];
        for &w in [u, v].iter().chain(alphas) {
            f.push(GammaFactor::num(w, 1));
            f.push(GammaFactor::num(w, -1));
        }
        f
    }

    fn g(x: f64) -> f64 {
        log_gamma_unchecked(c(x)).re.exp() * if x < 0.0 && (x.floor() as i64) % 2 != 0 { -1.0 } else { 1.0 }
    }

    #[test]
    fn continuation_reproduces_dual_hahn_closed_form() {
        // ∫Γ(u±z)Γ(v±z)Γ(α±z)/(2Γ(±2z)) = Γ(u+v)Γ(u+α)Γ(v+α), continued in u.
        for (u, v, a) in [(0.8, 0.6, 1.3), (-0.3, 1.0, 1.0), (-1.3, 1.9, 2.0), (0.4, -0.25, 0.9)] {
            let (val, crossings) =
                continued_line_integral(&wilson_factors(u, v, &[a]), |_| c(0.5), 0.0, 0.5 * std::f64::consts::PI, 1e-12).unwrap();
            let exact = g(u + v) * g(u + a) * g(v + a);
            assert!((val.re / exact - 1.0).abs() < 1e-10, "({u}, {v}, {a}): {val} vs {exact}");
            assert_eq!(crossings.is_empty(), u > 0.0 && v > 0.0);
        }
    }

    #[test]
    fn continuation_reproduces_wilson_closed_form() {
        let (u, v, a) = (-0.45, 0.7, 1.1);
        let (val, _) =
            continued_line_integral(&wilson_factors(u, v, &[a, a]), |_| c(0.5), 0.0, std::f64::consts::PI, 1e-12).unwrap();
        let exact = g(u + v) * g(u + a).powi(2) * g(v + a).powi(2) * g(2.0 * a) / g(u + v + 2.0 * a);
        assert!((val.re / exact - 1.0).abs() < 1e-10, "{val} vs {exact}");
    }

    #[test]
    fn pinched_contour_is_a_collision() {
        // u + v = 0: the left pole −u meets the right pole v.
        let r = continued_line_integral(&wilson_factors(-0.4, 0.4, &[1.0]), |_| c(0.5), 0.0, 1.0, 1e-10);
        assert!(matches!(r, Err(Error::Collision(_))));
    }
}
