use std::collections::HashMap;
use std::sync::Mutex;

use super::params::{GeoParams, LgParams};
use crate::error::{Error, Result};
use crate::formulas::partition_lg;
use crate::numerics::gamma::{log_gamma_unchecked, log_spectral_measure, trigamma};
use crate::numerics::quadrature::{integrate_circle, integrate_vertical, ContourSpec};
use crate::numerics::{log_bessel_k, log_bessel_k_real};
use rayon::prelude::*;
use crate::Complex64;

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// q_M(ℓ) by the unit-circle integral
/// ½∮ (z^{ℓ+1} − z^{−ℓ−1})(1/z − z) / ((1 − c₂z)(1 − c₂/z)) ∏ (1−a)²/((1−az)(1−a/z)) dz/(2πiz),
/// the product running over the last M bulk rates.
///
/// Accurate in absolute terms (the integrand is O(1) on the circle); the
/// tables in [`GeoDoob`] keep relative accuracy at large ℓ.
pub fn q_geo(m: usize, ell: i64, params: &GeoParams) -> Result<f64> {
    params.validate()?;
    params.require_subcritical()?;
    if m > params.n() {
        return Err(Error::InvalidArgument(format!("q index {m} exceeds N = {}", params.n())));
    }
    if ell < 0 {
        return Err(Error::InvalidArgument(format!("negative gap {ell}")));
    }
    let a = params.tail(m).to_vec();
    let c2 = params.c2;
    let e = (ell + 1) as i32;
    let f = move |z: Complex64| -> Complex64 {
        let zi = z.inv();
        let mut g = (z.powi(e) - zi.powi(e)) * (zi - z) * 0.5 / ((1.0 - c2 * z) * (1.0 - c2 * zi));
        for &ai in &a {
            g *= (1.0 - ai) * (1.0 - ai) / ((1.0 - ai * z) * (1.0 - ai * zi));
        }
        g * zi
    };
    let spec = ContourSpec::circle(1.0).with_tol(1e-12).with_initial_nodes(64.max(2 * (ell as usize + 2)).next_power_of_two());
    Ok(integrate_circle(f, &spec)?.require("q_M contour")?.re)
}

/// Cached q_M(ℓ) tables for M = 0..=N and the normaliser Σ_ℓ c₁^ℓ q_N(ℓ).
///
/// The tables are filled with the one-site recursion
/// q_M(ℓ) = (1−a)²/(1−a²) Σ_g a^{|ℓ−g|}(1 − a^{2 min(ℓ,g)+2}) q_{M−1}(g),
/// a = a_{N−M+1}, q₀(g) = c₂^g, which only adds positive terms; each sum
/// is split into the parts g ≥ ℓ and g < ℓ and accumulated by two linear
/// sweeps. Gaps outside the table fall back to the contour integral.
#[derive(Clone, Debug)]
pub struct GeoDoob {
    params: GeoParams,
    q: Vec<Vec<f64>>,
    denominator: f64,
    gap_cdf: Vec<f64>,
}

/// Tail mass left out of the initial gap law.
pub const GAP_TAIL: f64 = 1e-12;

impl GeoDoob {
    pub fn new(params: &GeoParams) -> Result<Self> {
        params.validate()?;
        params.require_subcritical()?;
        let n = params.n();
        let a_max = params.a.iter().cloned().fold(params.c2, f64::max).max(1e-3);
        // Distance over which one step of the recursion forgets a boundary error.
        let reach = ((1e-18f64).ln() / a_max.ln()).ceil() as usize + 8;
        let mut len = 128usize.max(4 * reach);
        loop {
            let q = build_tables(params, len + reach);
            let denominator = weighted_sum(params.c1, &q[n]);
            let bound = 2.0 / (1.0 - params.c2).powi(2);
            let cut = gap_cutoff(params.c1, bound / denominator);
            if cut + 4 * reach <= len {
                let q: Vec<Vec<f64>> = q.into_iter().map(|mut row| {
                    row.truncate(len);
                    row
                }).collect();
                let mut gap_cdf = Vec::with_capacity(cut + 1);
                let mut acc = 0.0;
                let mut ck = 1.0;
                for row_val in q[n].iter().take(cut + 1) {
                    acc += ck * row_val / denominator;
                    gap_cdf.push(acc);
                    ck *= params.c1;
                }
                if (1.0 - acc).abs() > 1e-9 {
                    return Err(Error::TailBound { bound: (1.0 - acc).abs(), requested: 1e-9 });
                }
                return Ok(GeoDoob { params: params.clone(), q, denominator, gap_cdf });
            }
            len = cut + 4 * reach + 64;
        }
    }

    pub fn params(&self) -> &GeoParams {
        &self.params
    }

    pub fn n(&self) -> usize {
        self.params.n()
    }

    /// Σ_ℓ c₁^ℓ q_N(ℓ) (= ∏(1 − aᵢ)² times the partition function).
    pub fn denominator(&self) -> f64 {
        self.denominator
    }

    /// Largest gap held in the tables.
    pub fn table_len(&self) -> usize {
        self.q[0].len()
    }

    pub fn q(&self, m: usize, ell: i64) -> Result<f64> {
        if m > self.n() || ell < 0 {
            return Err(Error::InvalidArgument(format!("q_{m}({ell}) with N = {}", self.n())));
        }
        match self.q[m].get(ell as usize) {
            Some(&v) => Ok(v),
            None => q_geo(m, ell, &self.params),
        }
    }

    /// h_{x,N}(ℓ) = q_{N−x}(ℓ) / Σ_ℓ c₁^ℓ q_N(ℓ).
    pub fn h(&self, x: usize, ell: i64) -> Result<f64> {
        if x > self.n() {
            return Err(Error::InvalidArgument(format!("site {x} beyond N = {}", self.n())));
        }
        Ok(self.q(self.n() - x, ell)? / self.denominator)
    }

    /// Law of the initial gap, 𝗉₀(ℓ) = c₁^ℓ h_{0,N}(ℓ).
    pub fn initial_gap_probability(&self, ell: i64) -> Result<f64> {
        let ck = if ell == 0 { 1.0 } else { self.params.c1.powi(ell as i32) };
        Ok(ck * self.h(0, ell)?)
    }

    /// Cumulative initial gap law up to the cutoff where the remaining tail
    /// is below [`GAP_TAIL`].
    pub fn gap_cdf(&self) -> &[f64] {
        &self.gap_cdf
    }
}

/// Smallest G with c₁^{G+1}·scale/(1 − c₁) < GAP_TAIL.
fn gap_cutoff(c1: f64, scale: f64) -> usize {
    if c1 == 0.0 {
        return 0;
    }
    let g = ((GAP_TAIL * (1.0 - c1) / scale).ln() / c1.ln()).ceil() - 1.0;
    g.max(0.0) as usize
}

fn weighted_sum(c1: f64, row: &[f64]) -> f64 {
    let mut ck = 1.0;
    let mut s = 0.0;
    for &v in row {
        s += ck * v;
        ck *= c1;
        if ck == 0.0 {
            break;
        }
    }
    s
}

fn build_tables(params: &GeoParams, len: usize) -> Vec<Vec<f64>> {
    let n = params.n();
    let mut q = Vec::with_capacity(n + 1);
    let mut row: Vec<f64> = (0..len).map(|g| params.c2.powi(g as i32)).collect();
    q.push(row.clone());
    for m in 1..=n {
        let a = params.a[n - m];
        row = recursion_step(a, &row);
        q.push(row.clone());
    }
    q
}

/// One application of the one-site kernel to a truncated table. Values past
/// the end are extrapolated geometrically from the last two entries.
fn recursion_step(a: f64, prev: &[f64]) -> Vec<f64> {
    let len = prev.len();
    let ratio = if len >= 2 && prev[len - 2] > 0.0 {
        (prev[len - 1] / prev[len - 2]).clamp(0.0, 0.999)
    } else {
        0.0
    };
    // up[ℓ] = Σ_{g≥ℓ} a^{g−ℓ} q(g)
    let mut up = vec![0.0; len];
    let mut acc = prev[len - 1] / (1.0 - a * ratio);
    up[len - 1] = acc;
    for l in (0..len - 1).rev() {
        acc = prev[l] + a * acc;
        up[l] = acc;
    }
    // down[ℓ] = Σ_{g<ℓ} a^{ℓ−g}(1 − a^{2g+2}) q(g)
    let a2 = a * a;
    let pref = (1.0 - a) * (1.0 - a) / (1.0 - a2);
    let mut out = vec![0.0; len];
    let mut down = 0.0;
    let mut a_pow = a2; // a^{2ℓ+2}
    for l in 0..len {
        if l > 0 {
            let g = l - 1;
            let w = 1.0 - a2.powi(g as i32 + 1);
            down = a * (down + w * prev[g]);
        }
        out[l] = pref * ((1.0 - a_pow) * up[l] + down);
        a_pow *= a2;
    }
    out
}

/// Standalone h_{x,N}(ℓ) with the normaliser ∏(1 − aᵢ)²·Z(N) from the
/// partition-function integral; prefer [`GeoDoob`] for repeated use.
pub fn h_geo(x: usize, ell: i64, params: &GeoParams) -> Result<f64> {
    let n = params.n();
    if x > n {
        return Err(Error::InvalidArgument(format!("site {x} beyond N = {n}")));
    }
    let z = crate::formulas::partition_geo(params)?;
    let bulk: f64 = params.a.iter().map(|a| (1.0 - a) * (1.0 - a)).product();
    Ok(q_geo(n - x, ell, params)? / (bulk * z))
}

/// Q_M(ℓ) = ∫_{iℝ} 2K_{2z}(2e^{−ℓ/2}) Γ(v ± z)/(2Γ(±2z)) ∏ Γ(α ± z)/Γ(α)² dz/(2πi),
/// product over the last M shapes; Q₀(ℓ) = e^{−vℓ}.
///
/// The integrand oscillates for large ℓ, so relative accuracy degrades once
/// Q_M(ℓ) drops far below e^{−vℓ}·10⁻¹⁰; [`LgDoob`] uses the positive
/// recursion instead and only falls back to this contour far out.
pub fn q_lg(m: usize, ell: f64, params: &LgParams) -> Result<f64> {
    params.validate()?;
    if m > params.n() {
        return Err(Error::InvalidArgument(format!("Q index {m} exceeds N = {}", params.n())));
    }
    if !ell.is_finite() {
        return Err(Error::InvalidArgument(format!("gap {ell}")));
    }
    if m == 0 {
        return Ok((-params.v * ell).exp());
    }
    if params.v <= 0.0 {
        return Err(Error::Parameter(format!("the Q integral needs v > 0, got {}", params.v)));
    }
    let alphas = params.tail(m).to_vec();
    let v = params.v;
    let x = 2.0 * (-0.5 * ell).exp();
    // K_{2z}(x)/K₀(x) stays O(1) on the contour even when K₀(x) underflows.
    let scale = log_bessel_k_real(0.0, x)?;
    let norm: f64 = alphas.iter().map(|&a| 2.0 * log_gamma_unchecked(c(a)).re).sum::<f64>() + scale;
    let f = |z: Complex64| -> Complex64 {
        let Ok(k) = log_bessel_k(2.0 * z, x) else {
            return c(f64::NAN);
        };
        let mut s = 2f64.ln() + k + log_gamma_unchecked(v + z) + log_gamma_unchecked(v - z) + log_spectral_measure(z) - norm;
        for &a in &alphas {
            s += log_gamma_unchecked(a + z) + log_gamma_unchecked(a - z);
        }
        crate::formulas::finite_exp(s)
    };
    let curvature = alphas.iter().map(|&a| trigamma(c(a)).map(|t| t.re)).sum::<Result<f64>>()?;
    let half = (6.0 / curvature.sqrt()).clamp(0.05, 4.0);
    let spec = ContourSpec::vertical(0.0).with_tol(1e-10).with_half_height(half);
    let decay = 0.5 * std::f64::consts::PI * m as f64;
    Ok(integrate_vertical(f, &spec, decay)?.require("Q_M integral")?.re * scale.exp())
}

/// log of the one-site kernel of the log-gamma Q recursion,
/// K_α(ℓ, g) = 2Γ(α)^{−2} (e^ℓ + e^g)^{−α} K_{2α}(2√(e^{−ℓ} + e^{−g})),
/// so that Q_M(ℓ) = ∫ K_α(ℓ, g) Q_{M−1}(g) dg with α the shape of the first of
/// the last M sites. It is Γ(α)^{−2}∫Ψ_α(μ/(ℓ, 0)) dμ over μ₁ − μ₂ = g.
pub fn log_lg_site_kernel(alpha: f64, ell: f64, g: f64) -> Result<f64> {
    let arg = 2.0 * (0.5 * log_add_exp(-ell, -g)).exp();
    Ok(2f64.ln() - 2.0 * log_gamma_unchecked(c(alpha)).re - alpha * log_add_exp(ell, g)
        + log_bessel_k_real(2.0 * alpha, arg)?)
}

fn log_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Spacing of the ℓ-grid of [`LgDoob`]. The Q's are analytic in a strip of
/// half-width π around ℝ, so the trapezoid error is of order e^{−2π²/step}.
pub const LG_GRID_STEP: f64 = 0.2;
/// Below this gap every Q_M is smaller than exp(−100).
pub const LG_GRID_MIN: f64 = -8.0;
/// Queries closer than this to the top of the grid use the contour instead.
const LG_GRID_MARGIN: f64 = 15.0;

/// Doob transform of the log-gamma two-layer measure.
///
/// Q_M is tabulated on a uniform ℓ-grid by the positive recursion
/// Q_M(ℓ) = ∫ K_α(ℓ, g) Q_{M−1}(g) dg (trapezoid rule); a value at any ℓ is
/// one more application of the kernel to the table below it (Nyström
/// interpolation), memoised per (M, ℓ).
#[derive(Debug)]
pub struct LgDoob {
    params: LgParams,
    denominator: f64,
    grid: Vec<f64>,
    tables: Vec<Vec<f64>>,
    memo: Mutex<HashMap<(usize, u64), f64>>,
}

impl LgDoob {
    pub fn new(params: &LgParams) -> Result<Self> {
        params.validate()?;
        params.require_normalizable()?;
        params.require_positive_boundaries()?;
        let min_alpha = params.alphas.iter().cloned().fold(f64::INFINITY, f64::min);
        // Q_{M−1}(g) K(ℓ, g) decays at least like e^{−rate·g} for large g.
        let rate = min_alpha + params.v.min(min_alpha);
        let top = (40.0 / rate + 20.0).clamp(40.0, 400.0);
        let len = ((top - LG_GRID_MIN) / LG_GRID_STEP).ceil() as usize + 1;
        let grid: Vec<f64> = (0..len).map(|j| LG_GRID_MIN + j as f64 * LG_GRID_STEP).collect();
        let n = params.n();
        let mut matrices: HashMap<u64, Vec<f64>> = HashMap::new();
        let mut tables = Vec::with_capacity(n + 1);
        tables.push(grid.iter().map(|&g| (-params.v * g).exp()).collect::<Vec<f64>>());
        for m in 1..=n {
            let alpha = params.alphas[n - m];
            if !matrices.contains_key(&alpha.to_bits()) {
                matrices.insert(alpha.to_bits(), kernel_matrix(alpha, &grid)?);
            }
            let k = &matrices[&alpha.to_bits()];
            let prev = &tables[m - 1];
            let row: Vec<f64> = (0..len)
                .into_par_iter()
                .map(|i| LG_GRID_STEP * k[i * len..(i + 1) * len].iter().zip(prev).map(|(a, b)| a * b).sum::<f64>())
                .collect();
            tables.push(row);
        }
        let mut doob = LgDoob { params: params.clone(), denominator: 1.0, grid, tables, memo: Mutex::new(HashMap::new()) };
        doob.denominator = doob.denominator_from_partition()?;
        Ok(doob)
    }

    pub fn params(&self) -> &LgParams {
        &self.params
    }

    pub fn n(&self) -> usize {
        self.params.n()
    }

    /// ∫ e^{−uℓ} Q_N(ℓ) dℓ = Z(N)/∏Γ(αᵢ)².
    pub fn denominator(&self) -> f64 {
        self.denominator
    }

    /// The ℓ-grid and the tabulated Q_M on it.
    pub fn table(&self, m: usize) -> Option<(&[f64], &[f64])> {
        self.tables.get(m).map(|t| (self.grid.as_slice(), t.as_slice()))
    }

    pub fn q(&self, m: usize, ell: f64) -> Result<f64> {
        if m > self.n() {
            return Err(Error::InvalidArgument(format!("Q index {m} exceeds N = {}", self.n())));
        }
        if !ell.is_finite() {
            return Err(Error::InvalidArgument(format!("gap {ell}")));
        }
        if m == 0 {
            return Ok((-self.params.v * ell).exp());
        }
        let key = (m, ell.to_bits());
        if let Some(v) = self.memo.lock().expect("memo lock").get(&key) {
            return Ok(*v);
        }
        let top = self.grid[self.grid.len() - 1];
        let v = if ell <= top - LG_GRID_MARGIN {
            let alpha = self.params.alphas[self.n() - m];
            let prev = &self.tables[m - 1];
            let mut s = 0.0;
            for (&g, &q) in self.grid.iter().zip(prev) {
                if q > 0.0 {
                    s += (log_lg_site_kernel(alpha, ell, g)? + q.ln()).exp();
                }
            }
            LG_GRID_STEP * s
        } else {
            q_lg(m, ell, &self.params)?
        };
        self.memo.lock().expect("memo lock").insert(key, v);
        Ok(v)
    }

    /// H_{x,N}(ℓ) = Q_{N−x}(ℓ) / ∫ e^{−uℓ} Q_N.
    pub fn h(&self, x: usize, ell: f64) -> Result<f64> {
        if x > self.n() {
            return Err(Error::InvalidArgument(format!("site {x} beyond N = {}", self.n())));
        }
        Ok(self.q(self.n() - x, ell)? / self.denominator)
    }

    /// Z(N)/∏Γ(αᵢ)² from the partition-function integral.
    pub fn denominator_from_partition(&self) -> Result<f64> {
        let z = partition_lg(&self.params)?;
        let g: f64 = self.params.alphas.iter().map(|&a| 2.0 * log_gamma_unchecked(c(a)).re).sum();
        Ok(z * (-g).exp())
    }

    /// ∫ e^{−uℓ} Q_N(ℓ) dℓ by the trapezoid rule on the table.
    pub fn denominator_by_quadrature(&self) -> f64 {
        let q = &self.tables[self.n()];
        LG_GRID_STEP * self.grid.iter().zip(q).map(|(&g, &v)| (-self.params.u * g).exp() * v).sum::<f64>()
    }
}

fn kernel_matrix(alpha: f64, grid: &[f64]) -> Result<Vec<f64>> {
    let len = grid.len();
    let rows: Vec<Result<Vec<f64>>> = (0..len)
        .into_par_iter()
        .map(|i| grid.iter().map(|&g| log_lg_site_kernel(alpha, grid[i], g).map(f64::exp)).collect())
        .collect();
    let mut out = Vec::with_capacity(len * len);
    for r in rows {
        out.extend(r?);
    }
    Ok(out)
}

/// N → ∞ limit of h_{0,N} for homogeneous bulk rates: (ℓ + 1)(1 − c₁)².
pub fn limit_doob_geo(ell: i64, params: &GeoParams) -> Result<f64> {
    params.validate()?;
    if !params.is_homogeneous() || params.c2 >= 1.0 {
        return Err(Error::Parameter("the limit needs homogeneous rates and c2 < 1".into()));
    }
    if ell < 0 {
        return Err(Error::InvalidArgument(format!("negative gap {ell}")));
    }
    Ok((ell + 1) as f64 * (1.0 - params.c1).powi(2))
}

/// N → ∞ limit of H_{0,N} for homogeneous shapes: 2K₀(2e^{−ℓ/2})/Γ(u)².
pub fn limit_doob_lg(ell: f64, params: &LgParams) -> Result<f64> {
    params.validate()?;
    if !params.is_homogeneous() || params.v <= 0.0 || params.u <= 0.0 {
        return Err(Error::Parameter("the limit needs homogeneous shapes and u, v > 0".into()));
    }
    let k0 = log_bessel_k(c(0.0), 2.0 * (-0.5 * ell).exp())?.re;
    Ok((2f64.ln() + k0 - 2.0 * log_gamma_unchecked(c(params.u)).re).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulas::partition_geo;

    fn geo() -> GeoParams {
        GeoParams::new(vec![0.5, 0.6, 0.45], 0.3, 0.4).unwrap()
    }

    #[test]
    fn empty_alphabet_contour() {
        let p = GeoParams::new(vec![], 0.3, 0.4).unwrap();
        assert!((q_geo(0, 2, &p).unwrap() - 0.16).abs() < 1e-10);
        assert!((q_geo(0, 0, &p).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn recursion_matches_contour() {
        let p = geo();
        let d = GeoDoob::new(&p).unwrap();
        for m in 0..=3 {
            for ell in [0i64, 1, 2, 5, 11] {
                let direct = q_geo(m, ell, &p).unwrap();
                let table = d.q(m, ell).unwrap();
                assert!((direct - table).abs() < 1e-11 * direct.abs().max(1e-3), "m={m} ell={ell}: {direct} vs {table}");
            }
        }
    }

    #[test]
    fn recursion_is_one_site_branching() {
        // q₁(ℓ) = (1−a)² Σ_{μ ≻ (ℓ,0)} a^{|μ|−ℓ} c₂^{μ₁−μ₂} by direct enumeration.
        let p = GeoParams::new(vec![0.55], 0.2, 0.35).unwrap();
        let d = GeoDoob::new(&p).unwrap();
        for ell in 0..6i64 {
            let mut s = 0.0;
            for m1 in ell..ell + 200 {
                for m2 in 0..=ell {
                    s += 0.55f64.powi((m1 + m2 - ell) as i32) * 0.35f64.powi((m1 - m2) as i32);
                }
            }
            s *= 0.45 * 0.45;
            assert!((s - d.q(1, ell).unwrap()).abs() < 1e-14, "{ell}");
        }
    }

    #[test]
    fn normaliser_is_bulk_factor_times_partition() {
        let p = GeoParams::homogeneous(2, 0.5, 0.3, 0.4).unwrap();
        let d = GeoDoob::new(&p).unwrap();
        let z = partition_geo(&p).unwrap();
        let bulk = 0.5f64.powi(4);
        assert!((d.denominator() / (bulk * z) - 1.0).abs() < 1e-12);
        let h_direct = h_geo(1, 3, &p).unwrap();
        assert!((h_direct - d.h(1, 3).unwrap()).abs() < 1e-10 * h_direct);
    }

    #[test]
    fn initial_gap_law_sums_to_one() {
        let d = GeoDoob::new(&geo()).unwrap();
        let last = *d.gap_cdf().last().unwrap();
        assert!((1.0 - last).abs() < 1e-11);
    }

    #[test]
    fn h_is_positive_and_bounded() {
        let p = geo();
        let d = GeoDoob::new(&p).unwrap();
        let bound = 2.0 / (1.0 - p.c2).powi(2);
        for x in 0..=3 {
            for ell in 0..d.table_len() as i64 {
                let q = d.q(3 - x, ell).unwrap();
                assert!(q > 0.0 && q <= bound, "x={x} ell={ell} q={q}");
            }
        }
    }

    #[test]
    fn limit_at_zero_gap() {
        let p = GeoParams::homogeneous(4, 0.5, 0.3, 0.4).unwrap();
        assert!((limit_doob_geo(0, &p).unwrap() - 0.49).abs() < 1e-15);
    }

    #[test]
    fn geo_doob_converges_to_linear_limit() {
        let p = GeoParams::homogeneous(200, 0.5, 0.3, 0.4).unwrap();
        let d = GeoDoob::new(&p).unwrap();
        for ell in 0..=5 {
            let rel = d.h(0, ell).unwrap() / limit_doob_geo(ell, &p).unwrap() - 1.0;
            assert!(rel.abs() < 0.02, "ell = {ell}: {rel}");
        }
    }

    #[test]
    fn lg_q0_is_exponential() {
        let p = LgParams::homogeneous(2, 1.0, 0.8, 0.8).unwrap();
        assert!((q_lg(0, 1.5, &p).unwrap() - (-1.2f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn lg_one_site_q_by_plane_integral() {
        // Q₁(ℓ) = Γ(α)^{−2} ∫ Ψ_α(μ/(ℓ,0)) e^{−v(μ₁−μ₂)} dμ
        let p = LgParams::homogeneous(1, 1.2, 0.5, 0.9).unwrap();
        let ell = 0.7;
        let direct = q_lg(1, ell, &p).unwrap();
        let log_f = |m1: f64, m2: f64| -> Complex64 {
            c(super::super::density::log_baxter2(1.2, [m1, m2], [ell, 0.0]) - 0.9 * (m1 - m2))
        };
        let opts = crate::numerics::PlaneOptions { rel_tol: 1e-10, ..Default::default() };
        let plane = crate::numerics::integrate_plane(log_f, (ell, 0.0), opts).unwrap().value.re;
        let g = log_gamma_unchecked(c(1.2)).re;
        let via_plane = plane * (-2.0 * g).exp();
        assert!((direct / via_plane - 1.0).abs() < 1e-8, "{direct} vs {via_plane}");
    }

    #[test]
    fn lg_q_is_stable_under_refinement() {
        let p = LgParams::homogeneous(1, 1.0, 0.8, 0.8).unwrap();
        let coarse = q_lg(1, 0.0, &p).unwrap();
        let x = 2.0;
        let f = |z: Complex64| -> Complex64 {
            let k = log_bessel_k(2.0 * z, x).unwrap();
            let s = 2f64.ln() + k + log_gamma_unchecked(0.8 + z) + log_gamma_unchecked(0.8 - z)
                + log_gamma_unchecked(1.0 + z) + log_gamma_unchecked(1.0 - z) + log_spectral_measure(z);
            let v = s.exp();
            if v.re.is_finite() { v } else { c(0.0) }
        };
        let fine = integrate_vertical(f, &ContourSpec::vertical(0.0).with_tol(1e-13).with_initial_nodes(256), 3.0)
            .unwrap()
            .value
            .re;
        assert!((coarse - fine).abs() < 1e-9 * fine.abs());
    }

    #[test]
    fn lg_normaliser_matches_partition() {
        let p = LgParams::homogeneous(2, 1.0, 0.8, 0.8).unwrap();
        let d = LgDoob::new(&p).unwrap();
        let quad = d.denominator_by_quadrature();
        assert!((d.denominator() / quad - 1.0).abs() < 1e-9, "{} vs {}", d.denominator(), quad);
    }

    #[test]
    fn lg_recursion_matches_contour() {
        let p = LgParams::new(vec![1.3, 0.9], 0.7, 0.6).unwrap();
        let d = LgDoob::new(&p).unwrap();
        for m in 1..=2 {
            for ell in [-3.0, -0.4, 0.0, 1.7, 6.0, 12.0] {
                let rec = d.q(m, ell).unwrap();
                let con = q_lg(m, ell, &p).unwrap();
                assert!((rec / con - 1.0).abs() < 1e-8, "Q_{m}({ell}): {rec} vs {con}");
            }
        }
        // Nyström values agree with the table on grid points.
        let (grid, t) = d.table(2).unwrap();
        let j = 60;
        assert!((d.q(2, grid[j]).unwrap() / t[j] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lg_contour_handles_negative_gaps() {
        let p = LgParams::homogeneous(2, 1.0, 0.8, 0.8).unwrap();
        let q = q_lg(2, -6.0, &p).unwrap();
        let d = LgDoob::new(&p).unwrap();
        assert!((q / d.q(2, -6.0).unwrap() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn lg_limit_normalises_and_grows_linearly() {
        let p = LgParams::homogeneous(3, 1.0, 0.7, 0.6).unwrap();
        let r = crate::numerics::quadrature::integrate_real_line(
            |l: f64| c((-0.7 * l).exp() * limit_doob_lg(l, &p).unwrap()),
            1.0,
            6.0,
            1e-10,
        );
        assert!((r.value.re - 1.0).abs() < 1e-8, "{}", r.value.re);
        // H(ℓ)/ℓ → 1/Γ(u)² from the logarithmic growth of K₀ at 0.
        let g = (2.0 * log_gamma_unchecked(c(0.7)).re).exp();
        let slope = (limit_doob_lg(80.0, &p).unwrap() - limit_doob_lg(60.0, &p).unwrap()) / 20.0;
        assert!((slope * g - 1.0).abs() < 1e-6, "{}", slope * g);
    }
}
