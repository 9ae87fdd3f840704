use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Where a contour integral is taken.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum ContourKind {
    /// Positively oriented circle |z − center| = radius.
    Circle { center: Complex64, radius: f64 },
    /// The upward line Re z = real_part; `half_height` is only the initial
    /// truncation, it grows until the tail is negligible.
    Vertical { real_part: f64, half_height: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ContourSpec {
    pub kind: ContourKind,
    pub initial_nodes: usize,
    pub rel_tol: f64,
    pub max_nodes: usize,
}

pub const DEFAULT_REL_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_NODES: usize = 1 << 20;

impl ContourSpec {
    pub fn circle(radius: f64) -> Self {
        Self::circle_at(Complex64::new(0.0, 0.0), radius)
    }

    pub fn circle_at(center: Complex64, radius: f64) -> Self {
        ContourSpec {
            kind: ContourKind::Circle { center, radius },
            initial_nodes: 32,
            rel_tol: DEFAULT_REL_TOL,
            max_nodes: DEFAULT_MAX_NODES,
        }
    }

    pub fn vertical(real_part: f64) -> Self {
        ContourSpec {
            kind: ContourKind::Vertical { real_part, half_height: 4.0 },
            initial_nodes: 32,
            rel_tol: DEFAULT_REL_TOL,
            max_nodes: DEFAULT_MAX_NODES,
        }
    }

    pub fn with_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_max_nodes(mut self, max_nodes: usize) -> Self {
        self.max_nodes = max_nodes;
        self
    }

    /// Initial truncation of a vertical line; ignored for circles.
    pub fn with_half_height(mut self, h: f64) -> Self {
        if let ContourKind::Vertical { half_height, .. } = &mut self.kind {
            *half_height = h;
        }
        self
    }

    pub fn with_initial_nodes(mut self, n: usize) -> Self {
        self.initial_nodes = n;
        self
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            ContourKind::Circle { radius, .. } if !(radius > 0.0) => {
                return Err(Error::InvalidArgument(format!("circle radius {radius}")))
            }
            ContourKind::Vertical { half_height, .. } if !(half_height > 0.0) => {
                return Err(Error::InvalidArgument(format!("half height {half_height}")))
            }
            _ => {}
        }
        if self.initial_nodes < 8 || self.initial_nodes % 2 != 0 {
            return Err(Error::InvalidArgument(format!(
                "initial_nodes must be even and >= 8, got {}",
                self.initial_nodes
            )));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(Error::InvalidArgument(format!("rel_tol {}", self.rel_tol)));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QuadratureResult {
    pub value: Complex64,
    pub error_estimate: f64,
    pub nodes_used: usize,
    pub converged: bool,
}

impl QuadratureResult {
    /// The value, or a non-convergence error naming `what`.
    pub fn require(self, what: &str) -> Result<Complex64> {
        if self.converged && self.value.re.is_finite() && self.value.im.is_finite() {
            Ok(self.value)
        } else {
            Err(Error::NonConvergence(format!(
                "{what}: estimate {} with error {:e} after {} nodes",
                self.value, self.error_estimate, self.nodes_used
            )))
        }
    }
}

// Integrals that cancel to (near) zero are judged relative to this fraction
// of the L1 mass instead of their own size.
pub const FLOOR_FRACTION: f64 = 1e-6;

/// Converged when the error is below rel_tol relative to the value (or to a
/// small fraction of the absolute mass, for values near zero). Integrals with
/// heavy cancellation are also accepted at the roundoff level of the mass, as
/// long as the tolerance itself is attainable in double precision.
pub(crate) fn accept(error: f64, rel_tol: f64, value: Complex64, l1: f64) -> bool {
    if error <= rel_tol * value.norm().max(FLOOR_FRACTION * l1) {
        return true;
    }
    rel_tol >= MIN_ATTAINABLE_TOL && error <= ROUNDOFF_FACTOR * f64::EPSILON * l1
}

/// Tolerances below this cannot be certified in double precision.
pub const MIN_ATTAINABLE_TOL: f64 = 8.0 * f64::EPSILON;
const ROUNDOFF_FACTOR: f64 = 64.0;
const PAR_THRESHOLD: usize = 512;

fn eval_many<T, F>(points: &[T], f: &F) -> Vec<Complex64>
where
    T: Sync + Copy,
    F: Fn(T) -> Complex64 + Sync,
{
    if points.len() >= PAR_THRESHOLD {
        points.par_iter().map(|&p| f(p)).collect()
    } else {
        points.iter().map(|&p| f(p)).collect()
    }
}

/// ∮ f(z) dz/(2πi) over a circle by the trapezoid rule with node doubling.
pub fn integrate_circle<F>(f: F, spec: &ContourSpec) -> Result<QuadratureResult>
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    spec.validate()?;
    let (center, radius) = match spec.kind {
        ContourKind::Circle { center, radius } => (center, radius),
        _ => return Err(Error::InvalidArgument("integrate_circle needs a circle".into())),
    };
    let node = |k: usize, n: usize| -> Complex64 {
        let theta = 2.0 * PI * k as f64 / n as f64;
        Complex64::from_polar(radius, theta)
    };
    let g = |w: Complex64| f(center + w) * w;

    let mut n = spec.initial_nodes;
    let pts: Vec<Complex64> = (0..n).map(|k| node(k, n)).collect();
    let vals = eval_many(&pts, &g);
    let mut sum: Complex64 = vals.iter().sum();
    let mut abs_sum: f64 = vals.iter().map(|v| v.norm()).sum();
    let mut estimate = sum / n as f64;
    let mut error = f64::INFINITY;
    while 2 * n <= spec.max_nodes {
        let pts: Vec<Complex64> = (0..n).map(|k| node(2 * k + 1, 2 * n)).collect();
        let vals = eval_many(&pts, &g);
        sum += vals.iter().sum::<Complex64>();
        abs_sum += vals.iter().map(|v| v.norm()).sum::<f64>();
        n *= 2;
        let next = sum / n as f64;
        error = (next - estimate).norm();
        estimate = next;
        if accept(error, spec.rel_tol, estimate, abs_sum / n as f64) {
            return Ok(QuadratureResult {
                value: estimate,
                error_estimate: error,
                nodes_used: n,
                converged: true,
            });
        }
    }
    Ok(QuadratureResult { value: estimate, error_estimate: error, nodes_used: n, converged: false })
}

/// Trapezoid rule for ∫_ℝ g(y) dy with growing window and step halving.
/// `decay_rate` is a hint κ with |g(y)| ≲ e^{−κ|y|}; it seeds the window.
fn line_trapezoid<G>(
    g: &G,
    center: f64,
    half_height: f64,
    initial_nodes: usize,
    rel_tol: f64,
    max_nodes: usize,
    decay_rate: f64,
) -> QuadratureResult
where
    G: Fn(f64) -> Complex64 + Sync,
{
    let mut y_max = half_height;
    if decay_rate > 0.0 {
        y_max = y_max.max(((1.0 / rel_tol).ln() + 10.0) / decay_rate);
    }
    let mut h = 2.0 * half_height / initial_nodes as f64;
    let mut j_max = (y_max / h).ceil() as i64;
    let pts: Vec<f64> = (-j_max..=j_max).map(|j| center + j as f64 * h).collect();
    let vals = eval_many(&pts, g);
    let mut sum: Complex64 = vals.iter().sum();
    let mut abs_sum: f64 = vals.iter().map(|v| v.norm()).sum();
    let mut edge = vals[0].norm().max(vals[vals.len() - 1].norm());
    let mut nodes = pts.len();
    let mut previous: Option<Complex64> = None;
    let mut error = f64::INFINITY;

    loop {
        // Grow the window until the edge values are negligible.
        loop {
            let value = sum * h;
            let tail = edge * (h + if decay_rate > 0.0 { 1.0 / decay_rate } else { 1.0 });
            if accept(tail, 0.1 * rel_tol, value, abs_sum * h) {
                break;
            }
            if nodes >= max_nodes {
                return QuadratureResult {
                    value,
                    error_estimate: error.max(tail),
                    nodes_used: nodes,
                    converged: false,
                };
            }
            let new_j = ((j_max as f64) * 1.5).ceil() as i64 + 1;
            let pts: Vec<f64> = (j_max + 1..=new_j)
                .flat_map(|j| [center + j as f64 * h, center - j as f64 * h])
                .collect();
            let vals = eval_many(&pts, g);
            sum += vals.iter().sum::<Complex64>();
            abs_sum += vals.iter().map(|v| v.norm()).sum::<f64>();
            let k = vals.len();
            edge = vals[k - 1].norm().max(vals[k - 2].norm());
            nodes += k;
            j_max = new_j;
        }
        let value = sum * h;
        if let Some(prev) = previous {
            error = (value - prev).norm();
            if accept(error, rel_tol, value, abs_sum * h) {
                return QuadratureResult {
                    value,
                    error_estimate: error,
                    nodes_used: nodes,
                    converged: true,
                };
            }
        }
        if nodes * 2 > max_nodes {
            return QuadratureResult { value, error_estimate: error, nodes_used: nodes, converged: false };
        }
        previous = Some(value);
        // Halve the step: midpoints of the current grid.
        let pts: Vec<f64> = (-j_max..j_max).map(|j| center + (j as f64 + 0.5) * h).collect();
        let vals = eval_many(&pts, g);
        sum += vals.iter().sum::<Complex64>();
        abs_sum += vals.iter().map(|v| v.norm()).sum::<f64>();
        nodes += pts.len();
        h *= 0.5;
        j_max *= 2;
    }
}

/// ∫_{σ+iℝ} f(z) dz/(2πi).
pub fn integrate_vertical<F>(f: F, spec: &ContourSpec, decay_rate: f64) -> Result<QuadratureResult>
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    spec.validate()?;
    let (sigma, half_height) = match spec.kind {
        ContourKind::Vertical { real_part, half_height } => (real_part, half_height),
        _ => return Err(Error::InvalidArgument("integrate_vertical needs a line".into())),
    };
    let g = |y: f64| f(Complex64::new(sigma, y));
    let mut r = line_trapezoid(
        &g,
        0.0,
        half_height,
        spec.initial_nodes,
        spec.rel_tol,
        spec.max_nodes,
        decay_rate,
    );
    r.value /= 2.0 * PI;
    r.error_estimate /= 2.0 * PI;
    Ok(r)
}

/// ∫_ℝ f(x) dx for smooth integrands decaying away from `center`.
pub fn integrate_real_line<F>(f: F, center: f64, width: f64, rel_tol: f64) -> QuadratureResult
where
    F: Fn(f64) -> Complex64 + Sync,
{
    line_trapezoid(&f, center, width, 32, rel_tol, DEFAULT_MAX_NODES, 0.0)
}

/// k-fold product of circles, k ≤ 3, with the tensor trapezoid rule.
pub fn integrate_circles<F>(f: F, radii: &[f64], rel_tol: f64, max_nodes: usize) -> Result<QuadratureResult>
where
    F: Fn(&[Complex64]) -> Complex64 + Sync,
{
    let k = radii.len();
    if k == 0 || k > 3 {
        return Err(Error::Unsupported(format!("{k}-fold circle integral")));
    }
    let eval = |n: usize| -> (Complex64, f64) {
        let total = n.pow(k as u32);
        let terms: Vec<Complex64> = (0..total)
            .into_par_iter()
            .map(|mut idx| {
                let mut z = [Complex64::new(0.0, 0.0); 3];
                let mut jac = Complex64::new(1.0, 0.0);
                for (d, r) in radii.iter().enumerate() {
                    let kk = idx % n;
                    idx /= n;
                    z[d] = Complex64::from_polar(*r, 2.0 * PI * kk as f64 / n as f64);
                    jac *= z[d];
                }
                f(&z[..k]) * jac
            })
            .collect();
        let s: Complex64 = terms.iter().sum();
        let a: f64 = terms.iter().map(|v| v.norm()).sum();
        let norm = total as f64;
        (s / norm, a / norm)
    };
    let mut n = 16usize;
    let (mut estimate, _) = eval(n);
    let mut error = f64::INFINITY;
    while (2 * n).pow(k as u32) <= max_nodes {
        n *= 2;
        let (next, l1) = eval(n);
        error = (next - estimate).norm();
        estimate = next;
        if accept(error, rel_tol, estimate, l1) {
            return Ok(QuadratureResult {
                value: estimate,
                error_estimate: error,
                nodes_used: n.pow(k as u32),
                converged: true,
            });
        }
    }
    Ok(QuadratureResult { value: estimate, error_estimate: error, nodes_used: n.pow(k as u32), converged: false })
}

/// k-fold product of vertical lines Re z_i = sigmas[i], k ≤ 3, measure
/// ∏ dz_i/(2πi). `decay_rate` bounds |f| ≲ e^{−κ max|y_i|}.
pub fn integrate_verticals<F>(
    f: F,
    sigmas: &[f64],
    decay_rate: f64,
    rel_tol: f64,
    max_nodes: usize,
) -> Result<QuadratureResult>
where
    F: Fn(&[Complex64]) -> Complex64 + Sync,
{
    let k = sigmas.len();
    if k == 0 || k > 3 {
        return Err(Error::Unsupported(format!("{k}-fold vertical integral")));
    }
    let mut y_max = if decay_rate > 0.0 { ((1.0 / rel_tol).ln() + 10.0) / decay_rate } else { 8.0 };
    let mut h = 0.25f64;
    let eval = |h: f64, j_max: i64| -> (Complex64, f64, f64) {
        let side = (2 * j_max + 1) as usize;
        let total = side.pow(k as u32);
        let terms: Vec<(Complex64, bool)> = (0..total)
            .into_par_iter()
            .map(|mut idx| {
                let mut z = [Complex64::new(0.0, 0.0); 3];
                let mut on_edge = false;
                for (d, s) in sigmas.iter().enumerate() {
                    let j = (idx % side) as i64 - j_max;
                    idx /= side;
                    on_edge |= j.abs() == j_max;
                    z[d] = Complex64::new(*s, j as f64 * h);
                }
                (f(&z[..k]), on_edge)
            })
            .collect();
        let w = (h / (2.0 * PI)).powi(k as i32);
        let s: Complex64 = terms.iter().map(|t| t.0).sum::<Complex64>() * w;
        let a: f64 = terms.iter().map(|t| t.0.norm()).sum::<f64>() * w;
        let edge = terms.iter().filter(|t| t.1).map(|t| t.0.norm()).fold(0.0, f64::max);
        (s, a, edge)
    };
    let mut previous: Option<Complex64> = None;
    let mut error = f64::INFINITY;
    let mut nodes;
    loop {
        let j_max = (y_max / h).ceil() as i64;
        nodes = ((2 * j_max + 1) as usize).pow(k as u32);
        if nodes > max_nodes {
            let value = previous.unwrap_or(Complex64::new(f64::NAN, 0.0));
            return Ok(QuadratureResult { value, error_estimate: error, nodes_used: nodes, converged: false });
        }
        let (value, l1, edge) = eval(h, j_max);
        let edge_mass = edge * (h / (2.0 * PI)).powi(k as i32 - 1) / (2.0 * PI)
            * (h + if decay_rate > 0.0 { 1.0 / decay_rate } else { 1.0 })
            * (2.0 * y_max).powi(k as i32 - 1)
            / h.powi(k as i32 - 1);
        if !accept(edge_mass, 0.1 * rel_tol, value, l1) {
            y_max *= 1.5;
            previous = None;
            continue;
        }
        if let Some(prev) = previous {
            error = (value - prev).norm();
            if accept(error, rel_tol, value, l1) {
                return Ok(QuadratureResult { value, error_estimate: error, nodes_used: nodes, converged: true });
            }
        }
        previous = Some(value);
        h *= 0.5;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn circle_basics() {
        let spec = ContourSpec::circle(1.0);
        let r = integrate_circle(|z| z.inv(), &spec).unwrap();
        assert!(r.converged && (r.value - 1.0).norm() < 1e-14);
        let r = integrate_circle(|z| z * z * z, &spec).unwrap();
        assert!(r.converged && r.value.norm() < 1e-14);
        let r = integrate_circle(|z| ((1.0 - 0.5 * z) * (z - 0.5)).inv(), &spec).unwrap();
        assert!((r.value - 4.0 / 3.0).norm() < 1e-12);
        assert!(r.nodes_used <= spec.max_nodes);
    }

    #[test]
    fn circle_exact_on_laurent_polynomials() {
        let spec = ContourSpec::circle(1.3).with_initial_nodes(16);
        // coefficient of z^{-1} is 2.5
        let r = integrate_circle(|z| 3.0 * z.powi(5) + 2.5 / z - 1.0 / (z * z * z) + 7.0, &spec).unwrap();
        assert!((r.value - 2.5).norm() < 1e-13);
    }

    #[test]
    fn shifted_circle_residue() {
        let spec = ContourSpec::circle_at(c(2.0, 1.0), 1e-3);
        let r = integrate_circle(|z| z.exp() / (z - c(2.0, 1.0)), &spec).unwrap();
        assert!((r.value - c(2.0, 1.0).exp()).norm() < 1e-12);
    }

    #[test]
    fn vertical_gaussian() {
        let r = integrate_vertical(|z| (z * z).exp(), &ContourSpec::vertical(0.0), 1.0).unwrap();
        assert!(r.converged);
        assert!((r.value.re - 0.5 / std::f64::consts::PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn vertical_mellin() {
        let f = |z: Complex64| crate::numerics::gamma::log_gamma_unchecked(z).exp();
        let r = integrate_vertical(f, &ContourSpec::vertical(1.0), std::f64::consts::FRAC_PI_2).unwrap();
        assert!(r.converged);
        assert!((r.value - (-1f64).exp()).norm() < 1e-10, "{}", r.value);
    }

    #[test]
    fn unreachable_tolerance_reports_non_convergence() {
        let spec = ContourSpec::circle(1.0).with_tol(1e-30).with_max_nodes(1 << 12);
        let r = integrate_circle(|z| ((1.0 - 0.9 * z) * (z - 0.9)).inv(), &spec).unwrap();
        assert!(!r.converged);
        assert!(r.require("test").is_err());
    }

    #[test]
    fn double_circle_factorises() {
        let f = |z: &[Complex64]| ((z[0] - 0.3) * (z[1] - 0.2) * (1.0 - 0.4 * z[1])).inv();
        let r = integrate_circles(f, &[1.0, 1.0], 1e-12, 1 << 20).unwrap();
        assert!((r.value - 1.0 / (1.0 - 0.08)).norm() < 1e-11, "{}", r.value);
    }

    #[test]
    fn double_vertical_factorises() {
        let f = |z: &[Complex64]| (z[0] * z[0] + z[1] * z[1]).exp();
        let r = integrate_verticals(f, &[0.0, 0.0], 1.0, 1e-11, 1 << 22).unwrap();
        let one = 0.5 / std::f64::consts::PI.sqrt();
        assert!((r.value.re - one * one).abs() < 1e-12, "{}", r.value);
    }
}
