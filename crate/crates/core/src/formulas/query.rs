use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Points 0 < x₁ < … < x_k = N and times t₁, …, t_k of a multipoint Laplace
/// transform of the top walk L₁.
///
/// Times follow the walk convention: the geometric transform is
/// E[∏ tᵢ^{2(L₁(xᵢ) − L₁(xᵢ₋₁))}] and the log-gamma one
/// E[∏ e^{−2tᵢ(L₁(xᵢ) − L₁(xᵢ₋₁))}]. The two-layer formulas use the
/// squared (geometric) or doubled (log-gamma) times; see
/// [`LaplaceQuery::geo_layer_times`] and [`LaplaceQuery::lg_layer_times`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LaplaceQuery {
    pub points: Vec<usize>,
    pub t: Vec<f64>,
}

impl LaplaceQuery {
    pub fn new(points: Vec<usize>, t: Vec<f64>) -> Result<Self> {
        if points.is_empty() || points.len() != t.len() {
            return Err(Error::InvalidArgument(format!("{} points and {} times", points.len(), t.len())));
        }
        if points[0] == 0 || points.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument(format!("points {points:?} must increase strictly from x₁ ≥ 1")));
        }
        if t.iter().any(|s| !s.is_finite()) {
            return Err(Error::InvalidArgument("times must be finite".into()));
        }
        Ok(LaplaceQuery { points, t })
    }

    /// One time over the whole strip, x₁ = N.
    pub fn single(n: usize, t: f64) -> Result<Self> {
        Self::new(vec![n], vec![t])
    }

    pub fn k(&self) -> usize {
        self.points.len()
    }

    pub fn n(&self) -> usize {
        *self.points.last().expect("non-empty")
    }

    /// (xᵢ₋₁, xᵢ, tᵢ) for each segment.
    pub fn segments(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.points.iter().enumerate().map(|(i, &x)| (if i == 0 { 0 } else { self.points[i - 1] }, x, self.t[i]))
    }

    /// Time index of site x ∈ 1..=N.
    pub fn segment_of(&self, x: usize) -> usize {
        self.points.partition_point(|&p| p < x)
    }

    pub fn require_width(&self, n: usize) -> Result<()> {
        if self.n() != n {
            return Err(Error::InvalidArgument(format!("last point {} but N = {n}", self.n())));
        }
        Ok(())
    }

    /// Times of the geometric two-layer transform E[∏ sᵢ^{Δλ₁}], sᵢ = tᵢ².
    pub fn geo_layer_times(&self) -> Vec<f64> {
        self.t.iter().map(|s| s * s).collect()
    }

    /// Times of the log-gamma two-layer transform E[∏ e^{−sᵢΔλ₁}], sᵢ = 2tᵢ.
    pub fn lg_layer_times(&self) -> Vec<f64> {
        self.t.iter().map(|s| 2.0 * s).collect()
    }
}
