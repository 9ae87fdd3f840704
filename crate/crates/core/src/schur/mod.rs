//! Schur and skew Schur polynomials on integer signatures, plus brute-force
//! checks of the summation identities they satisfy.

mod verify;

pub use verify::{
    verify_cauchy, verify_cauchy_exact, verify_cauchy_rational, verify_littlewood, verify_littlewood_exact, verify_rsk_sum,
    verify_rsk_sum_exact, verify_signature_identities, verify_signature_identities_exact,
    IdentityCheck, Scalar, SignatureReport,
};

use num_complex::Complex64;
use num_traits::Num;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::numerics::quadrature::integrate_circles;

/// Weakly decreasing integer vector λ₁ ≥ … ≥ λₙ.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Signature {
    parts: Vec<i64>,
}

impl Signature {
    pub fn new(parts: Vec<i64>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidArgument("signature needs at least one part".into()));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidArgument(format!("{parts:?} is not weakly decreasing")));
        }
        Ok(Signature { parts })
    }

    /// Two-part signature (λ₁, λ₂); panics if λ₁ < λ₂.
    pub fn pair(l1: i64, l2: i64) -> Self {
        Self::new(vec![l1, l2]).expect("pair must satisfy λ₁ ≥ λ₂")
    }

    pub fn parts(&self) -> &[i64] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// |λ| = Σ λᵢ.
    pub fn size(&self) -> i64 {
        self.parts.iter().sum()
    }

    /// All parts nonnegative.
    pub fn is_nonnegative(&self) -> bool {
        *self.parts.last().unwrap() >= 0
    }

    pub fn shifted(&self, c: i64) -> Self {
        Signature { parts: self.parts.iter().map(|p| p + c).collect() }
    }

    /// λ₁ − λ₂ for two-part signatures.
    pub fn gap(&self) -> i64 {
        self.parts[0] - self.parts[1]
    }

    /// Interlacing λ ≺ μ, i.e. μ₁ ≥ λ₁ ≥ μ₂ ≥ λ₂ ≥ … ≥ μₙ ≥ λₙ.
    pub fn interlaces_below(&self, mu: &Signature) -> bool {
        self.len() == mu.len()
            && (0..self.len()).all(|i| {
                mu.parts[i] >= self.parts[i] && (i + 1 == self.len() || self.parts[i] >= mu.parts[i + 1])
            })
    }
}

pub(crate) fn pow_signed<T: Num + Clone>(x: &T, e: i64) -> T {
    let mut base = if e < 0 { T::one() / x.clone() } else { x.clone() };
    let mut e = e.unsigned_abs();
    let mut acc = T::one();
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base.clone();
        }
        base = base.clone() * base;
        e >>= 1;
    }
    acc
}

/// Complete homogeneous h_d(x₁, x₂) = Σ_k x₁^k x₂^{d−k}; this is also the
/// confluent-safe form of (x₁^{d+1} − x₂^{d+1})/(x₁ − x₂).
pub(crate) fn h2<T: Num + Clone>(x1: &T, x2: &T, d: i64) -> T {
    let mut acc = T::zero();
    let mut p = T::one();
    let mut q = pow_signed(x2, d);
    for k in 0..=d {
        acc = acc + p.clone() * q.clone();
        if k < d {
            p = p * x1.clone();
            q = pow_signed(x2, d - k - 1);
        }
    }
    acc
}

/// Two-variable Schur value via the shift property: s_{(l₁,l₂)} = (x₁x₂)^{l₂} h_{l₁−l₂}.
pub(crate) fn schur2<T: Num + Clone>(l1: i64, l2: i64, x1: &T, x2: &T) -> T {
    pow_signed(&(x1.clone() * x2.clone()), l2) * h2(x1, x2, l1 - l2)
}

/// Schur value by the branching rule over Gelfand–Tsetlin patterns; works in
/// any field, so it doubles as the exact-arithmetic path.
pub fn schur_branching<T: Num + Clone>(lambda: &Signature, x: &[T]) -> Result<T> {
    let n = lambda.len();
    if x.len() != n {
        return Err(Error::InvalidArgument(format!(
            "branching evaluation needs {} variables, got {}",
            n,
            x.len()
        )));
    }
    if n == 1 {
        return Ok(pow_signed(&x[0], lambda.parts[0]));
    }
    if n == 2 {
        return Ok(schur2(lambda.parts[0], lambda.parts[1], &x[0], &x[1]));
    }
    // s_λ(x₁..xₙ) = Σ_{ν ≺ λ, len n−1} s_ν(x₁..x_{n−1}) xₙ^{|λ|−|ν|}.
    let mut total = T::zero();
    let mut nu = vec![0i64; n - 1];
    fn rec<T: Num + Clone>(
        i: usize,
        lambda: &Signature,
        nu: &mut Vec<i64>,
        x: &[T],
        total: &mut T,
    ) -> Result<()> {
        let n = lambda.len();
        if i == n - 1 {
            let sig = Signature { parts: nu.clone() };
            let inner = schur_branching(&sig, &x[..n - 1])?;
            let e = lambda.size() - sig.size();
            *total = total.clone() + inner * pow_signed(&x[n - 1], e);
            return Ok(());
        }
        for v in lambda.parts[i + 1]..=lambda.parts[i] {
            nu[i] = v;
            rec(i + 1, lambda, nu, x, total)?;
        }
        Ok(())
    }
    rec(0, lambda, &mut nu, x, &mut total)?;
    Ok(total)
}

fn determinant(mut m: Vec<Vec<Complex64>>) -> Complex64 {
    let n = m.len();
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&a, &b| m[a][col].norm().partial_cmp(&m[b][col].norm()).unwrap())
            .unwrap();
        if m[pivot][col].norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        det *= m[col][col];
        for r in col + 1..n {
            let factor = m[r][col] / m[col][col];
            for c in col..n {
                let v = m[col][c];
                m[r][c] -= factor * v;
            }
        }
    }
    det
}

/// s_λ(x). With more variables than parts the signature is padded with
/// zeros (it must then be nonnegative); n = 2 uses the closed form and handles
/// coincident variables, n ≥ 3 uses the bialternant and needs distinct ones.
pub fn schur_value(lambda: &Signature, x: &[Complex64]) -> Result<Complex64> {
    let m = x.len();
    if m == 0 {
        return Err(Error::InvalidArgument("no variables".into()));
    }
    let mut parts = lambda.parts.clone();
    if parts.len() < m {
        if !lambda.is_nonnegative() {
            return Err(Error::InvalidArgument(
                "padding a signature with negative parts is undefined".into(),
            ));
        }
        parts.resize(m, 0);
    } else if parts.len() > m {
        if parts[m..].iter().any(|&p| p != 0) {
            if parts[m..].iter().all(|&p| p >= 0) && lambda.is_nonnegative() {
                // ℓ(λ) > number of variables.
                return Ok(Complex64::new(0.0, 0.0));
            }
            return Err(Error::InvalidArgument(format!("{} parts but {} variables", parts.len(), m)));
        }
        parts.truncate(m);
    }
    let lam = Signature { parts };
    if m <= 2 {
        if lam.parts.last().copied().unwrap_or(0) < 0 && x.iter().any(|z| z.norm() == 0.0) {
            return Err(Error::InvalidArgument("negative power of a zero variable".into()));
        }
        return schur_branching(&lam, x);
    }
    let scale = x.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
    for i in 0..m {
        for j in i + 1..m {
            if (x[i] - x[j]).norm() <= 1e-12 * scale {
                return Err(Error::InvalidArgument(format!(
                    "coincident variables x[{i}] and x[{j}] in a {m}-variable determinant"
                )));
            }
        }
    }
    let shift = *lam.parts.last().unwrap();
    if shift < 0 && x.iter().any(|z| z.norm() == 0.0) {
        return Err(Error::InvalidArgument("negative power of a zero variable".into()));
    }
    let mu = lam.shifted(-shift);
    let num: Vec<Vec<Complex64>> = x
        .iter()
        .map(|xi| (0..m).map(|j| xi.powi((mu.parts[j] + (m - 1 - j) as i64) as i32)).collect())
        .collect();
    let mut vandermonde = Complex64::new(1.0, 0.0);
    for i in 0..m {
        for j in i + 1..m {
            vandermonde *= x[i] - x[j];
        }
    }
    let prod: Complex64 = x.iter().product();
    Ok(determinant(num) / vandermonde * pow_signed(&prod, shift))
}

/// One-variable skew function 𝟙{λ ≺ μ} x^{|μ|−|λ|}.
pub(crate) fn skew_one<T: Num + Clone>(mu: &Signature, lambda: &Signature, x: &T) -> T {
    if lambda.interlaces_below(mu) {
        pow_signed(x, mu.size() - lambda.size())
    } else {
        T::zero()
    }
}

/// Signatures ν with λ ≺ ν and νᵢ ≤ μᵢ; with `tight` also ν ≺ μ.
fn between(lambda: &Signature, mu: &Signature, tight: bool) -> Vec<Signature> {
    let n = lambda.len();
    let mut out = Vec::new();
    let mut cur = vec![0i64; n];
    fn rec(
        i: usize,
        lambda: &Signature,
        mu: &Signature,
        tight: bool,
        cur: &mut Vec<i64>,
        out: &mut Vec<Signature>,
    ) {
        let n = lambda.len();
        if i == n {
            out.push(Signature { parts: cur.clone() });
            return;
        }
        // λᵢ ≤ νᵢ ≤ μᵢ, νᵢ ≤ λ_{i−1}, and νᵢ ≥ μ_{i+1} when ν ≺ μ is required.
        let mut lo = lambda.parts[i];
        if tight && i + 1 < n {
            lo = lo.max(mu.parts[i + 1]);
        }
        let mut hi = mu.parts[i];
        if i > 0 {
            hi = hi.min(lambda.parts[i - 1]).min(cur[i - 1]);
        }
        for v in lo..=hi {
            cur[i] = v;
            rec(i + 1, lambda, mu, tight, cur, out);
        }
    }
    rec(0, lambda, mu, tight, &mut cur, &mut out);
    out
}

/// s_{μ/λ}(x₁, …, x_k) by dynamic programming over intermediate signatures,
/// generic over the field so the same code gives exact rational values.
pub fn skew_schur_generic<T: Num + Clone>(mu: &Signature, lambda: &Signature, x: &[T]) -> Result<T> {
    if mu.len() != lambda.len() {
        return Err(Error::InvalidArgument(format!(
            "skew shape of lengths {} and {}",
            mu.len(),
            lambda.len()
        )));
    }
    match x.len() {
        0 => return Ok(if mu == lambda { T::one() } else { T::zero() }),
        1 => return Ok(skew_one(mu, lambda, &x[0])),
        _ => {}
    }
    // Skew shapes are shift invariant; move the lower part to λₙ = 0.
    let c = *lambda.parts.last().unwrap();
    let (mu, lambda) = (mu.shifted(-c), lambda.shifted(-c));
    let mut layer: BTreeMap<Signature, T> = BTreeMap::new();
    layer.insert(lambda.clone(), T::one());
    let k = x.len();
    for (step, xi) in x.iter().enumerate() {
        let last = step + 1 == k;
        let mut next: BTreeMap<Signature, T> = BTreeMap::new();
        for (nu, w) in &layer {
            let targets = if last { vec![mu.clone()] } else { between(nu, &mu, step + 2 == k) };
            for kappa in targets {
                let s = skew_one(&kappa, nu, xi);
                if s.is_zero() {
                    continue;
                }
                let e = next.entry(kappa).or_insert_with(T::zero);
                *e = e.clone() + w.clone() * s;
            }
        }
        layer = next;
    }
    Ok(layer.remove(&mu).unwrap_or_else(T::zero))
}

pub fn skew_schur_value(mu: &Signature, lambda: &Signature, x: &[Complex64]) -> Result<Complex64> {
    skew_schur_generic(mu, lambda, x)
}

/// s_{μ/λ}(a) from the double contour integral over unit circles with the
/// weight ½∏_{i≠j}(1 − zᵢ/zⱼ); two-part signatures only.
pub fn skew_schur_contour(mu: &Signature, lambda: &Signature, a: &[f64]) -> Result<Complex64> {
    if mu.len() != 2 || lambda.len() != 2 {
        return Err(Error::Unsupported("contour form implemented for two-part signatures".into()));
    }
    if let Some(bad) = a.iter().find(|v| !(v.abs() < 1.0)) {
        return Err(Error::InvalidArgument(format!("contour form needs |a| < 1, got {bad}")));
    }
    let (m1, m2) = (mu.parts[0], mu.parts[1]);
    let (l1, l2) = (lambda.parts[0], lambda.parts[1]);
    let f = |z: &[Complex64]| -> Complex64 {
        let (z1, z2) = (z[0], z[1]);
        let weight = 0.5 * (1.0 - z1 / z2) * (1.0 - z2 / z1);
        let s_mu = schur2(m1, m2, &z1.inv(), &z2.inv());
        let s_la = schur2(l1, l2, &z1, &z2);
        let mut bulk = Complex64::new(1.0, 0.0);
        for &aj in a {
            bulk /= (1.0 - z1 * aj) * (1.0 - z2 * aj);
        }
        weight * s_mu * s_la * bulk / (z1 * z2)
    };
    let r = integrate_circles(f, &[1.0, 1.0], 1e-12, 1 << 22)?;
    r.require("skew Schur contour")
}

/// Convenience: exact rational conversion of an f64 (binary fractions are exact).
pub fn rational(x: f64) -> num_rational::BigRational {
    num_rational::BigRational::from_float(x).expect("finite input")
}
