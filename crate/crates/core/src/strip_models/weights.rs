use rand::Rng;
use rand_distr::{Distribution, Gamma, Geometric};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::twolayer::{stream_rng, GeoParams, LgParams};

/// Weights of the cells (j + k, j), k = 0..=N, of rows j = 1..=rows.
/// k = 0 is the left boundary, k = N the right one.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StripWeights<T> {
    pub n: usize,
    pub rows: usize,
    values: Vec<T>,
}

impl<T: Copy> StripWeights<T> {
    pub fn from_rows(n: usize, rows: Vec<Vec<T>>) -> Result<Self> {
        if rows.iter().any(|r| r.len() != n + 1) {
            return Err(Error::InvalidArgument(format!("every row needs N + 1 = {} weights", n + 1)));
        }
        let count = rows.len();
        Ok(StripWeights { n, rows: count, values: rows.into_iter().flatten().collect() })
    }

    /// Weights of row j (1-based), left to right.
    pub fn row(&self, j: usize) -> &[T] {
        &self.values[(j - 1) * (self.n + 1)..j * (self.n + 1)]
    }

    /// Weight of cell (i, j); None outside the strip or the sampled rows.
    pub fn get(&self, i: usize, j: usize) -> Option<T> {
        if j == 0 || j > self.rows || i < j || i > j + self.n {
            return None;
        }
        Some(self.row(j)[i - j])
    }
}

fn strip_rate(params: &GeoParams) -> Result<f64> {
    params.validate()?;
    if params.a.is_empty() || !params.is_homogeneous() {
        return Err(Error::Parameter("the strip needs N >= 1 and a single bulk rate".into()));
    }
    Ok(params.a[0])
}

fn strip_shape(params: &LgParams) -> Result<f64> {
    params.validate()?;
    if params.alphas.is_empty() || !params.is_homogeneous() {
        return Err(Error::Parameter("the strip needs N >= 1 and a single shape".into()));
    }
    Ok(params.alphas[0])
}

/// P(k) = q^k (1 − q), k ≥ 0.
fn geometric<R: Rng + ?Sized>(q: f64, rng: &mut R) -> i64 {
    if q == 0.0 {
        return 0;
    }
    Geometric::new(1.0 - q).expect("rate checked by the parameters").sample(rng) as i64
}

/// Geometric LPP weights: Geom(a²) in the bulk, Geom(ac₁) on the left
/// boundary and Geom(ac₂) on the right one.
pub fn sample_strip_weights_geo_with<R: Rng + ?Sized>(params: &GeoParams, rows: usize, rng: &mut R) -> Result<StripWeights<i64>> {
    let a = strip_rate(params)?;
    let n = params.n();
    let mut values = Vec::with_capacity(rows * (n + 1));
    for _ in 0..rows {
        for k in 0..=n {
            let q = if k == 0 {
                a * params.c1
            } else if k == n {
                a * params.c2
            } else {
                a * a
            };
            values.push(geometric(q, rng));
        }
    }
    Ok(StripWeights { n, rows, values })
}

pub fn sample_strip_weights_geo(params: &GeoParams, rows: usize, seed: u64) -> Result<StripWeights<i64>> {
    sample_strip_weights_geo_with(params, rows, &mut stream_rng(seed, 0))
}

/// Log-gamma polymer weights, stored as log ω: ω ~ Gamma⁻¹(2α) in the bulk,
/// Gamma⁻¹(α + u) on the left boundary and Gamma⁻¹(α + v) on the right one.
pub fn sample_strip_weights_lg_with<R: Rng + ?Sized>(params: &LgParams, rows: usize, rng: &mut R) -> Result<StripWeights<f64>> {
    let alpha = strip_shape(params)?;
    let n = params.n();
    let shape = |k: usize| {
        if k == 0 {
            alpha + params.u
        } else if k == n {
            alpha + params.v
        } else {
            2.0 * alpha
        }
    };
    let laws: Vec<Gamma<f64>> = (0..=n)
        .map(|k| Gamma::new(shape(k), 1.0).map_err(|e| Error::Parameter(format!("gamma shape {}: {e}", shape(k)))))
        .collect::<Result<_>>()?;
    let mut values = Vec::with_capacity(rows * (n + 1));
    for _ in 0..rows {
        for law in &laws {
            values.push(-law.sample(rng).ln());
        }
    }
    Ok(StripWeights { n, rows, values })
}

pub fn sample_strip_weights_lg(params: &LgParams, rows: usize, seed: u64) -> Result<StripWeights<f64>> {
    sample_strip_weights_lg_with(params, rows, &mut stream_rng(seed, 0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::McEstimate;

    #[test]
    fn zero_boundary_rate_gives_zero_weights() {
        let p = GeoParams::homogeneous(3, 0.5, 0.0, 0.4).unwrap();
        let w = sample_strip_weights_geo(&p, 200, 1).unwrap();
        assert!((1..=200).all(|j| w.row(j)[0] == 0));
        assert_eq!(w.get(5, 5), Some(0));
        assert_eq!(w.get(9, 5), None);
    }

    #[test]
    fn bulk_geometric_mean() {
        let a: f64 = 0.5;
        let p = GeoParams::homogeneous(2, a, 0.3, 0.4).unwrap();
        let w = sample_strip_weights_geo(&p, 100_000, 3).unwrap();
        let bulk: Vec<f64> = (1..=w.rows).map(|j| w.row(j)[1] as f64).collect();
        let est = McEstimate::from_iid(&bulk);
        let exact = a * a / (1.0 - a * a);
        assert!(est.z_score(exact) < 3.0, "{est:?} vs {exact}");
    }

    #[test]
    fn inverse_gamma_bulk_moment() {
        // 1/ω ~ Gamma(2α) has mean 2α.
        let p = LgParams::homogeneous(2, 1.3, 0.4, 0.6).unwrap();
        let w = sample_strip_weights_lg(&p, 100_000, 4).unwrap();
        let inv: Vec<f64> = (1..=w.rows).map(|j| (-w.row(j)[1]).exp()).collect();
        let est = McEstimate::from_iid(&inv);
        assert!(est.z_score(2.6) < 3.0, "{est:?}");
    }

    #[test]
    fn weights_are_seed_deterministic() {
        let p = LgParams::homogeneous(3, 1.0, 0.5, 0.5).unwrap();
        assert_eq!(sample_strip_weights_lg(&p, 10, 9).unwrap(), sample_strip_weights_lg(&p, 10, 9).unwrap());
    }
}
