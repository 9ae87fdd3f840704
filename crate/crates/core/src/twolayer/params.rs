use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters of the geometric model: bulk rates aᵢ ∈ (0, 1) on the N sites of
/// a row and the boundary rates c₁ (left) and c₂ (right).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeoParams {
    pub a: Vec<f64>,
    pub c1: f64,
    pub c2: f64,
}

impl GeoParams {
    pub fn new(a: Vec<f64>, c1: f64, c2: f64) -> Result<Self> {
        let p = GeoParams { a, c1, c2 };
        p.validate()?;
        Ok(p)
    }

    /// N copies of the same bulk rate.
    pub fn homogeneous(n: usize, a: f64, c1: f64, c2: f64) -> Result<Self> {
        Self::new(vec![a; n], c1, c2)
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c1 >= 0.0 && self.c1.is_finite()) || !(self.c2 >= 0.0 && self.c2.is_finite()) {
            return Err(Error::Parameter(format!("c1 = {}, c2 = {} must be nonnegative", self.c1, self.c2)));
        }
        for &a in &self.a {
            if !(a > 0.0 && a < 1.0) {
                return Err(Error::Parameter(format!("bulk rate a = {a} outside (0, 1)")));
            }
            if a * self.c1 >= 1.0 || a * self.c2 >= 1.0 {
                return Err(Error::Parameter(format!(
                    "a*c must stay below 1 (a = {a}, c1 = {}, c2 = {})",
                    self.c1, self.c2
                )));
            }
        }
        Ok(())
    }

    /// The stationary measure is a probability measure (needed by samplers).
    pub fn require_normalizable(&self) -> Result<()> {
        if self.c1 * self.c2 >= 1.0 {
            return Err(Error::Parameter(format!("c1*c2 = {} must be below 1", self.c1 * self.c2)));
        }
        Ok(())
    }

    /// Regime of the unit-circle integrals.
    pub fn require_subcritical(&self) -> Result<()> {
        if self.c1 >= 1.0 || self.c2 >= 1.0 {
            return Err(Error::Parameter(format!(
                "unit-circle formulas need c1, c2 < 1 (got {}, {})",
                self.c1, self.c2
            )));
        }
        Ok(())
    }

    pub fn is_homogeneous(&self) -> bool {
        self.a.windows(2).all(|w| w[0] == w[1])
    }

    /// Bulk rates of the last m sites.
    pub fn tail(&self, m: usize) -> &[f64] {
        &self.a[self.a.len() - m..]
    }
}

/// Parameters of the log-gamma model: bulk shapes αᵢ > 0 and boundary
/// parameters u (left) and v (right).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LgParams {
    pub alphas: Vec<f64>,
    pub u: f64,
    pub v: f64,
}

impl LgParams {
    pub fn new(alphas: Vec<f64>, u: f64, v: f64) -> Result<Self> {
        let p = LgParams { alphas, u, v };
        p.validate()?;
        Ok(p)
    }

    pub fn homogeneous(n: usize, alpha: f64, u: f64, v: f64) -> Result<Self> {
        Self::new(vec![alpha; n], u, v)
    }

    pub fn n(&self) -> usize {
        self.alphas.len()
    }

    pub fn validate(&self) -> Result<()> {
        if !self.u.is_finite() || !self.v.is_finite() {
            return Err(Error::Parameter(format!("u = {}, v = {}", self.u, self.v)));
        }
        for &al in &self.alphas {
            if !(al > 0.0 && al.is_finite()) {
                return Err(Error::Parameter(format!("shape alpha = {al} must be positive")));
            }
            if al + self.u <= 0.0 || al + self.v <= 0.0 {
                return Err(Error::Parameter(format!(
                    "alpha + u and alpha + v must be positive (alpha = {al}, u = {}, v = {})",
                    self.u, self.v
                )));
            }
        }
        Ok(())
    }

    pub fn require_normalizable(&self) -> Result<()> {
        if self.u + self.v <= 0.0 {
            return Err(Error::Parameter(format!("u + v = {} must be positive", self.u + self.v)));
        }
        if self.alphas.is_empty() {
            return Err(Error::Parameter("the log-gamma measure needs N >= 1".into()));
        }
        Ok(())
    }

    /// Regime of the direct vertical-line integrals.
    pub fn require_positive_boundaries(&self) -> Result<()> {
        if self.u <= 0.0 || self.v <= 0.0 {
            return Err(Error::Parameter(format!(
                "direct integrals need u, v > 0 (got {}, {})",
                self.u, self.v
            )));
        }
        Ok(())
    }

    pub fn is_homogeneous(&self) -> bool {
        self.alphas.windows(2).all(|w| w[0] == w[1])
    }

    pub fn tail(&self, m: usize) -> &[f64] {
        &self.alphas[self.alphas.len() - m..]
    }
}

/// Two paths of length N + 1 started at the origin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WalkPair<T> {
    pub l1: Vec<T>,
    pub l2: Vec<T>,
}

impl<T: Copy + Default + PartialEq> WalkPair<T> {
    pub fn new(l1: Vec<T>, l2: Vec<T>) -> Result<Self> {
        if l1.is_empty() || l1.len() != l2.len() {
            return Err(Error::InvalidArgument(format!(
                "walks of lengths {} and {}",
                l1.len(),
                l2.len()
            )));
        }
        if l1[0] != T::default() || l2[0] != T::default() {
            return Err(Error::InvalidArgument("walks must start at 0".into()));
        }
        Ok(WalkPair { l1, l2 })
    }

    /// Number of steps N.
    pub fn n(&self) -> usize {
        self.l1.len() - 1
    }
}

impl WalkPair<i64> {
    pub fn has_nonnegative_increments(&self) -> bool {
        self.l1.windows(2).all(|w| w[1] >= w[0]) && self.l2.windows(2).all(|w| w[1] >= w[0])
    }
}

/// Orientation of one letter of a down-right path.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Step {
    Right,
    Down,
}

/// A down-right lattice path encoded by its N letters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathWord {
    pub letters: Vec<Step>,
}

impl PathWord {
    pub fn horizontal(n: usize) -> Self {
        PathWord { letters: vec![Step::Right; n] }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }
}

/// A path λ⁰, …, λᴺ of two-component states; integer states for the
/// geometric model, real ones for the log-gamma model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoLayerPath<T> {
    pub states: Vec<[T; 2]>,
}

impl<T: Copy + std::ops::Sub<Output = T>> TwoLayerPath<T> {
    pub fn n(&self) -> usize {
        self.states.len().saturating_sub(1)
    }

    /// λ₁ˣ − λ₂ˣ at every x.
    pub fn gaps(&self) -> Vec<T> {
        self.states.iter().map(|s| s[0] - s[1]).collect()
    }

    /// The top layer x ↦ λ₁ˣ − λ₁⁰.
    pub fn top_increments(&self) -> Vec<T> {
        let base = self.states[0][0];
        self.states.iter().map(|s| s[0] - base).collect()
    }
}
