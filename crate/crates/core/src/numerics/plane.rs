use num_complex::Complex64;
use rayon::prelude::*;

use super::quadrature::QuadratureResult;
use crate::error::{Error, Result};

/// Options for [`integrate_plane`].
#[derive(Clone, Copy, Debug)]
pub struct PlaneOptions {
    pub rel_tol: f64,
    /// Half-width of the coarse mode search box around the hint.
    pub search_radius: f64,
    /// Magnitudes below exp(max − drop) are outside the integration box.
    pub log_drop: f64,
    pub max_nodes: usize,
}

impl Default for PlaneOptions {
    fn default() -> Self {
        PlaneOptions { rel_tol: 1e-9, search_radius: 30.0, log_drop: 42.0, max_nodes: 1 << 23 }
    }
}

/// ∫_{ℝ²} exp(log_f(x₁, x₂)) dx for integrands supplied in log form
/// (complex log, so signs and phases are allowed).
///
/// The box is centred at the mode found by a coarse grid search and each side
/// is pushed out until the integrand drops below exp(max − log_drop); then the
/// tensor trapezoid rule is refined by step halving.
pub fn integrate_plane<F>(log_f: F, hint: (f64, f64), opts: PlaneOptions) -> Result<QuadratureResult>
where
    F: Fn(f64, f64) -> Complex64 + Sync,
{
    integrate_plane_split(|_| Complex64::new(0.0, 0.0), log_f, hint, opts)
}

/// As [`integrate_plane`] for exp(log_slow(y) + log_fast(x, y)), where the
/// expensive factor depends on the second coordinate only; it is evaluated
/// once per grid row instead of once per node.
pub fn integrate_plane_split<S, F>(
    log_slow: S,
    log_fast: F,
    hint: (f64, f64),
    opts: PlaneOptions,
) -> Result<QuadratureResult>
where
    S: Fn(f64) -> Complex64 + Sync,
    F: Fn(f64, f64) -> Complex64 + Sync,
{
    let log_f = |x: f64, y: f64| log_slow(y) + log_fast(x, y);
    let re_log = |x: f64, y: f64| {
        let v = log_f(x, y).re;
        if v.is_nan() {
            f64::NEG_INFINITY
        } else {
            v
        }
    };
    let coarse = 0.5;
    let m = (opts.search_radius / coarse).ceil() as i64;
    let (mut peak, mut mode) = (f64::NEG_INFINITY, hint);
    let grid: Vec<(f64, f64, f64)> = (-m..=m)
        .into_par_iter()
        .flat_map_iter(|i| {
            (-m..=m).map(move |j| (hint.0 + i as f64 * coarse, hint.1 + j as f64 * coarse))
        })
        .map(|(x, y)| (x, y, re_log(x, y)))
        .collect();
    for &(x, y, v) in &grid {
        if v > peak {
            peak = v;
            mode = (x, y);
        }
    }
    if !peak.is_finite() {
        return Err(Error::NonConvergence("plane integrand has no finite values".into()));
    }

    // Side extents, measured from the mode in units of `coarse`.
    let mut ext = [4i64; 4]; // x−, x+, y−, y+
    let side_max = |ext: &[i64; 4], side: usize| -> f64 {
        let (x0, x1, y0, y1) = (
            mode.0 - ext[0] as f64 * coarse,
            mode.0 + ext[1] as f64 * coarse,
            mode.1 - ext[2] as f64 * coarse,
            mode.1 + ext[3] as f64 * coarse,
        );
        let pts: Vec<(f64, f64)> = match side {
            0 | 1 => {
                let x = if side == 0 { x0 } else { x1 };
                (-ext[2]..=ext[3]).map(|j| (x, mode.1 + j as f64 * coarse)).collect()
            }
            _ => {
                let y = if side == 2 { y0 } else { y1 };
                (-ext[0]..=ext[1]).map(|i| (mode.0 + i as f64 * coarse, y)).collect()
            }
        };
        pts.par_iter().map(|&(x, y)| re_log(x, y)).reduce(|| f64::NEG_INFINITY, f64::max)
    };
    let limit = 800i64;
    loop {
        let mut grew = false;
        for side in 0..4 {
            while ext[side] < limit && side_max(&ext, side) > peak - opts.log_drop {
                ext[side] += 2;
                grew = true;
            }
        }
        if !grew {
            break;
        }
    }
    if ext.iter().any(|&e| e >= limit) {
        return Err(Error::NonConvergence("plane integrand does not decay".into()));
    }

    let x_lo = mode.0 - ext[0] as f64 * coarse;
    let y_lo = mode.1 - ext[2] as f64 * coarse;
    let wx = (ext[0] + ext[1]) as f64 * coarse;
    let wy = (ext[2] + ext[3]) as f64 * coarse;

    let eval = |h: f64| -> (Complex64, f64, usize) {
        let nx = (wx / h).round() as usize;
        let ny = (wy / h).round() as usize;
        let slow: Vec<Complex64> = (0..=ny).into_par_iter().map(|j| log_slow(y_lo + j as f64 * h)).collect();
        let rows: Vec<(Complex64, f64)> = (0..=nx)
            .into_par_iter()
            .map(|i| {
                let x = x_lo + i as f64 * h;
                let wi = if i == 0 || i == nx { 0.5 } else { 1.0 };
                let mut s = Complex64::new(0.0, 0.0);
                let mut a = 0.0;
                for (j, sl) in slow.iter().enumerate() {
                    let y = y_lo + j as f64 * h;
                    let wj = if j == 0 || j == ny { 0.5 } else { 1.0 };
                    let v = (sl + log_fast(x, y) - peak).exp();
                    if v.re.is_finite() && v.im.is_finite() {
                        s += wi * wj * v;
                        a += wi * wj * v.norm();
                    }
                }
                (s, a)
            })
            .collect();
        let s: Complex64 = rows.iter().map(|r| r.0).sum();
        let a: f64 = rows.iter().map(|r| r.1).sum();
        (s * h * h, a * h * h, (nx + 1) * (ny + 1))
    };

    let mut h = 0.25;
    let (mut estimate, _, mut nodes) = eval(h);
    let mut error = f64::INFINITY;
    loop {
        let h_next = 0.5 * h;
        let count = ((wx / h_next) as usize + 1) * ((wy / h_next) as usize + 1);
        if count > opts.max_nodes {
            break;
        }
        h = h_next;
        let (next, l1, n) = eval(h);
        nodes = n;
        error = (next - estimate).norm();
        estimate = next;
        if super::quadrature::accept(error, opts.rel_tol, estimate, l1) {
            let scale = peak.exp();
            return Ok(QuadratureResult {
                value: estimate * scale,
                error_estimate: error * scale,
                nodes_used: nodes,
                converged: true,
            });
        }
    }
    let scale = peak.exp();
    Ok(QuadratureResult {
        value: estimate * scale,
        error_estimate: error * scale,
        nodes_used: nodes,
        converged: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_off_centre() {
        let f = |x: f64, y: f64| {
            Complex64::new(-((x - 3.0).powi(2) + 2.0 * (y + 1.0).powi(2)), 0.0)
        };
        let r = integrate_plane(f, (0.0, 0.0), PlaneOptions::default()).unwrap();
        let exact = std::f64::consts::PI / 2f64.sqrt();
        assert!(r.converged);
        assert!((r.value.re - exact).abs() < 1e-10 * exact);
    }

    #[test]
    fn split_matches_plain() {
        let slow = |y: f64| Complex64::new(-(y * y), 0.3 * y);
        let fast = |x: f64, y: f64| Complex64::new(-(x - y).powi(2), 0.0);
        let a = integrate_plane_split(slow, fast, (0.0, 0.0), PlaneOptions::default()).unwrap();
        let b = integrate_plane(|x, y| slow(y) + fast(x, y), (0.0, 0.0), PlaneOptions::default()).unwrap();
        assert!((a.value - b.value).norm() < 1e-13);
        // ∫ e^{−y² + 0.3iy} dy · √π = π e^{−0.0225}
        let exact = std::f64::consts::PI * (-0.0225f64).exp();
        assert!((a.value.re - exact).abs() < 1e-10 && a.value.im.abs() < 1e-10, "{}", a.value);
    }

    #[test]
    fn gumbel_walls() {
        // ∫ e^{−x − e^{−x}} dx = 1 in each coordinate.
        let f = |x: f64, y: f64| Complex64::new(-x - (-x).exp() - 2.0 * y - (-y).exp(), 0.0);
        let r = integrate_plane(f, (0.0, 0.0), PlaneOptions::default()).unwrap();
        // ∫ e^{−2y − e^{−y}} dy = Γ(2) = 1
        assert!((r.value.re - 1.0).abs() < 1e-9, "{}", r.value);
    }
}
