//! Truncated brute-force checks of the Cauchy, Littlewood and RSK-type sums.
//!
//! Each check carries an explicit geometric bound on the dropped tail. The
//! `_exact` variants accumulate in rational arithmetic, so their gap is pure
//! truncation error; the plain ones run in double precision.

use num_rational::BigRational;
use num_traits::{Num, Signed, ToPrimitive};
use serde::Serialize;

use super::{pow_signed, rational, skew_one, Signature};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub lhs: f64,
    pub rhs: f64,
    /// |lhs − rhs|, computed before rounding to f64.
    pub gap: f64,
    /// Upper bound on the terms dropped by the truncation.
    pub tail_bound: f64,
}

impl IdentityCheck {
    /// The gap is explained by truncation and is below `tol`.
    pub fn holds(&self, tol: f64) -> bool {
        let rounding = 4.0 * f64::EPSILON * self.rhs.abs().max(self.lhs.abs());
        self.gap <= self.tail_bound + rounding && self.gap < tol
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SignatureReport {
    pub cauchy: IdentityCheck,
    pub littlewood: IdentityCheck,
}

/// Field the sums are accumulated in.
pub trait Scalar: Num + Clone {
    fn approx(&self) -> f64;
    /// |self − other|, evaluated before rounding.
    fn distance(&self, other: &Self) -> f64;
}

impl Scalar for f64 {
    fn approx(&self) -> f64 {
        *self
    }
    fn distance(&self, other: &Self) -> f64 {
        (self - other).abs()
    }
}

impl Scalar for BigRational {
    fn approx(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
    fn distance(&self, other: &Self) -> f64 {
        (self - other).abs().approx()
    }
}

fn check<T: Scalar>(lhs: T, rhs: T, tail_bound: f64) -> IdentityCheck {
    IdentityCheck { lhs: lhs.approx(), rhs: rhs.approx(), gap: lhs.distance(&rhs), tail_bound }
}

/// Σ_{d ≥ start} (d+1)^p r^d, bounded above (summed until the ratio is
/// below one and the terms are negligible, then closed with a geometric bound).
fn poly_geometric_tail(p: i32, r: f64, start: u64) -> f64 {
    if r <= 0.0 {
        return if start == 0 { 1.0 } else { 0.0 };
    }
    if r >= 1.0 {
        return f64::INFINITY;
    }
    let mut acc: f64 = 0.0;
    let mut d = start;
    loop {
        let term = ((d + 1) as f64).powi(p) * r.powi(d as i32);
        let ratio = ((d + 2) as f64 / (d + 1) as f64).powi(p) * r;
        if ratio < 1.0 && term <= 1e-40 * acc.max(1e-300) {
            return acc + term / (1.0 - ratio);
        }
        if ratio < 1.0 && d > start + 100_000 {
            return acc + term / (1.0 - ratio);
        }
        acc += term;
        d += 1;
    }
}

/// Bound for Σ over d + j > K of (d+1)^p r^d s^j: every such pair has
/// d > ⌊K/2⌋ or j > ⌊K/2⌋.
fn two_index_tail(p: i32, r: f64, s: f64, cutoff: u64) -> f64 {
    if s >= 1.0 || r >= 1.0 {
        return f64::INFINITY;
    }
    let half = cutoff / 2;
    let geo_s = 1.0 / (1.0 - s);
    poly_geometric_tail(p, r, half + 1) * geo_s + s.powi((half + 1) as i32) * geo_s * poly_geometric_tail(p, r, 0)
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).fold(0.0, f64::max)
}

/// h_0(x), …, h_K(x) by h_d = x₁h_{d−1} + x₂^d.
fn complete_homogeneous<T: Num + Clone>(x: &[T; 2], cutoff: i64) -> Vec<T> {
    let mut out = Vec::with_capacity(cutoff as usize + 1);
    let mut h = T::one();
    let mut p2 = T::one();
    out.push(h.clone());
    for _ in 1..=cutoff {
        p2 = p2 * x[1].clone();
        h = h * x[0].clone() + p2.clone();
        out.push(h.clone());
    }
    out
}

/// Partial sums Σ_{j ≤ m} p^j for m = 0..=K.
fn geometric_prefix<T: Num + Clone>(p: &T, cutoff: i64) -> Vec<T> {
    let mut out = Vec::with_capacity(cutoff as usize + 1);
    let mut pj = T::one();
    let mut acc = T::zero();
    for _ in 0..=cutoff {
        acc = acc + pj.clone();
        out.push(acc.clone());
        pj = pj * p.clone();
    }
    out
}

/// Σ_{d + j ≤ K} p^j · f_d.
fn triangle_sum<T: Num + Clone>(f: &[T], p: &T, cutoff: i64) -> T {
    let prefix = geometric_prefix(p, cutoff);
    let mut total = T::zero();
    for (d, fd) in f.iter().enumerate() {
        total = total + fd.clone() * prefix[cutoff as usize - d].clone();
    }
    total
}

/// Σ_{λ₁ ≤ K} (x₁x₂y₁y₂)^{λ₂} h_d(x) h_d(y) c^d with d = λ₁ − λ₂.
fn two_row_sum<T: Num + Clone>(x: &[T; 2], y: &[T; 2], c: Option<&T>, cutoff: i64) -> T {
    let p = x[0].clone() * x[1].clone() * y[0].clone() * y[1].clone();
    let hx = complete_homogeneous(x, cutoff);
    let hy = complete_homogeneous(y, cutoff);
    let mut cd = T::one();
    let f: Vec<T> = hx
        .into_iter()
        .zip(hy)
        .map(|(a, b)| {
            let v = a * b * cd.clone();
            if let Some(c) = c {
                cd = cd.clone() * c.clone();
            }
            v
        })
        .collect();
    triangle_sum(&f, &p, cutoff)
}

fn check_cutoff(cutoff: i64) -> Result<()> {
    if cutoff < 0 {
        return Err(Error::InvalidArgument(format!("cutoff {cutoff}")));
    }
    Ok(())
}

fn approx2<T: Scalar>(v: &[T; 2]) -> [f64; 2] {
    [v[0].approx(), v[1].approx()]
}

fn rational2(v: [f64; 2]) -> [BigRational; 2] {
    [rational(v[0]), rational(v[1])]
}

/// Σ_{λ ∈ Sign⁺₂} s_λ(x)s_λ(y) = ∏ 1/(1 − xᵢyⱼ), truncated at λ₁ ≤ cutoff.
pub fn verify_cauchy(x: [f64; 2], y: [f64; 2], cutoff: i64) -> Result<IdentityCheck> {
    cauchy(x, y, cutoff)
}

pub fn verify_cauchy_exact(x: [BigRational; 2], y: [BigRational; 2], cutoff: i64) -> Result<IdentityCheck> {
    cauchy(x, y, cutoff)
}

/// As [`verify_cauchy_exact`] with the inputs converted exactly from f64.
pub fn verify_cauchy_rational(x: [f64; 2], y: [f64; 2], cutoff: i64) -> Result<IdentityCheck> {
    cauchy(rational2(x), rational2(y), cutoff)
}

fn cauchy<T: Scalar>(x: [T; 2], y: [T; 2], cutoff: i64) -> Result<IdentityCheck> {
    check_cutoff(cutoff)?;
    let r = max_abs(&approx2(&x)) * max_abs(&approx2(&y));
    if r >= 1.0 {
        return Err(Error::Parameter(format!("Cauchy sum diverges: max|x|·max|y| = {r}")));
    }
    let lhs = two_row_sum(&x, &y, None, cutoff);
    let mut rhs = T::one();
    for xi in &x {
        for yj in &y {
            rhs = rhs / (T::one() - xi.clone() * yj.clone());
        }
    }
    Ok(check(lhs, rhs, two_index_tail(2, r, r * r, cutoff as u64)))
}

/// Σ_λ s_λ(a) c^{λ₁−λ₂} = 1/((1 − ca₁)(1 − ca₂)(1 − a₁a₂)).
pub fn verify_littlewood(a: [f64; 2], c: f64, cutoff: i64) -> Result<IdentityCheck> {
    littlewood(a, c, cutoff)
}

pub fn verify_littlewood_exact(a: [BigRational; 2], c: BigRational, cutoff: i64) -> Result<IdentityCheck> {
    littlewood(a, c, cutoff)
}

fn littlewood<T: Scalar>(a: [T; 2], c: T, cutoff: i64) -> Result<IdentityCheck> {
    check_cutoff(cutoff)?;
    let m = max_abs(&approx2(&a));
    let cf = c.approx().abs();
    if m * cf >= 1.0 || m * m >= 1.0 {
        return Err(Error::Parameter(format!("Littlewood sum diverges (max|a| = {m}, |c| = {cf})")));
    }
    // s_λ(a) = (a₁a₂)^{λ₂} h_d(a).
    let p = a[0].clone() * a[1].clone();
    let mut cd = T::one();
    let f: Vec<T> = complete_homogeneous(&a, cutoff)
        .into_iter()
        .map(|h| {
            let v = h * cd.clone();
            cd = cd.clone() * c.clone();
            v
        })
        .collect();
    let lhs = triangle_sum(&f, &p, cutoff);
    let one = T::one;
    let rhs = one()
        / ((one() - c.clone() * a[0].clone()) * (one() - c.clone() * a[1].clone()) * (one() - p));
    Ok(check(lhs, rhs, two_index_tail(1, m * cf, m * m, cutoff as u64)))
}

/// Σ_λ s_λ(x)s_λ(y)c^{λ₁−λ₂} = Π(x, cy)(1 − c²x₁x₂y₁y₂)/(1 − x₁x₂y₁y₂).
pub fn verify_rsk_sum(x: [f64; 2], y: [f64; 2], c: f64, cutoff: i64) -> Result<IdentityCheck> {
    rsk_sum(x, y, c, cutoff)
}

pub fn verify_rsk_sum_exact(
    x: [BigRational; 2],
    y: [BigRational; 2],
    c: BigRational,
    cutoff: i64,
) -> Result<IdentityCheck> {
    rsk_sum(x, y, c, cutoff)
}

fn rsk_sum<T: Scalar>(x: [T; 2], y: [T; 2], c: T, cutoff: i64) -> Result<IdentityCheck> {
    check_cutoff(cutoff)?;
    let r = max_abs(&approx2(&x)) * max_abs(&approx2(&y));
    let cf = c.approx().abs();
    if r >= 1.0 || r * cf >= 1.0 {
        return Err(Error::Parameter(format!("RSK sum diverges: |xy| = {r}, |c| = {cf}")));
    }
    let lhs = two_row_sum(&x, &y, Some(&c), cutoff);
    let one = T::one;
    let p = x[0].clone() * x[1].clone() * y[0].clone() * y[1].clone();
    let mut rhs = (one() - c.clone() * c.clone() * p.clone()) / (one() - p);
    for xi in &x {
        for yj in &y {
            rhs = rhs / (one() - c.clone() * xi.clone() * yj.clone());
        }
    }
    Ok(check(lhs, rhs, two_index_tail(2, r * cf, r * r, cutoff as u64)))
}

/// The skew Cauchy and Littlewood identities over all of Sign₂:
///
///   Σ_λ s_{λ/μ}(a) s_{λ/ν}(b) = Σ_κ s_{μ/κ}(b) s_{ν/κ}(a),
///   Σ_λ c^{λ₁−λ₂} s_{λ/μ}(a) = Σ_κ c^{κ₁−κ₂} s_{μ/κ}(a).
///
/// On both sides one index runs to infinity (λ₁ upward, κ₂ downward); each
/// is cut `cutoff` steps past its first admissible value.
pub fn verify_signature_identities(
    mu: &Signature,
    nu: &Signature,
    a: f64,
    b: f64,
    c: f64,
    cutoff: i64,
) -> Result<SignatureReport> {
    signature_identities(mu, nu, a, b, c, cutoff)
}

pub fn verify_signature_identities_exact(
    mu: &Signature,
    nu: &Signature,
    a: BigRational,
    b: BigRational,
    c: BigRational,
    cutoff: i64,
) -> Result<SignatureReport> {
    signature_identities(mu, nu, a, b, c, cutoff)
}

fn signature_identities<T: Scalar>(
    mu: &Signature,
    nu: &Signature,
    a: T,
    b: T,
    c: T,
    cutoff: i64,
) -> Result<SignatureReport> {
    check_cutoff(cutoff)?;
    if mu.len() != 2 || nu.len() != 2 {
        return Err(Error::InvalidArgument("signature identities need two-part signatures".into()));
    }
    let (af, bf, cf) = (a.approx().abs(), b.approx().abs(), c.approx().abs());
    if af * bf >= 1.0 || af * cf >= 1.0 {
        return Err(Error::Parameter(format!("need |ab| < 1 and |ac| < 1 (a={af}, b={bf}, c={cf})")));
    }
    if af == 0.0 || bf == 0.0 {
        return Err(Error::Parameter("a and b must be nonzero on signatures".into()));
    }
    let (m1, m2) = (mu.parts()[0], mu.parts()[1]);
    let (n1, n2) = (nu.parts()[0], nu.parts()[1]);
    let top = m1.max(n1);
    let bottom = m2.min(n2);
    let band = (m2.max(n2), m1.min(n1));

    // Cauchy variant.
    let mut lhs = T::zero();
    let mut rhs = T::zero();
    let mut edge_l = 0.0;
    let mut edge_r = 0.0;
    if band.0 <= band.1 {
        for l2 in band.0..=band.1 {
            for l1 in top.max(l2)..=top + cutoff {
                let lam = Signature::pair(l1, l2);
                lhs = lhs + skew_one(&lam, mu, &a) * skew_one(&lam, nu, &b);
            }
            let l1 = top + cutoff + 1;
            let e = (l1 + l2) as f64;
            edge_l += af.powf(e - mu.size() as f64) * bf.powf(e - nu.size() as f64);
        }
        for k1 in band.0..=band.1 {
            for k2 in (bottom - cutoff)..=bottom.min(k1) {
                let kap = Signature::pair(k1, k2);
                rhs = rhs + skew_one(mu, &kap, &b) * skew_one(nu, &kap, &a);
            }
            let k2 = bottom - cutoff - 1;
            let e = (k1 + k2) as f64;
            edge_r += bf.powf(mu.size() as f64 - e) * af.powf(nu.size() as f64 - e);
        }
    }
    let tail = (edge_l + edge_r) / (1.0 - af * bf);
    let cauchy = check(lhs, rhs, tail);

    // Littlewood variant, with μ alone.
    let mut lhs = T::zero();
    let mut rhs = T::zero();
    let mut edge = 0.0;
    for l2 in m2..=m1 {
        for l1 in m1..=m1 + cutoff {
            let lam = Signature::pair(l1, l2);
            lhs = lhs + pow_signed(&c, l1 - l2) * skew_one(&lam, mu, &a);
        }
        let l1 = m1 + cutoff + 1;
        edge += cf.powi((l1 - l2) as i32) * af.powi((l1 + l2 - mu.size()) as i32);
    }
    for k1 in m2..=m1 {
        for k2 in (m2 - cutoff)..=m2 {
            let kap = Signature::pair(k1, k2);
            rhs = rhs + pow_signed(&c, k1 - k2) * skew_one(mu, &kap, &a);
        }
        let k2 = m2 - cutoff - 1;
        edge += cf.powi((k1 - k2) as i32) * af.powi((mu.size() - k1 - k2) as i32);
    }
    let littlewood = check(lhs, rhs, edge / (1.0 - af * cf));
    Ok(SignatureReport { cauchy, littlewood })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn zero_variables_collapse() {
        let r = verify_cauchy([0.0, 0.0], [0.0, 0.0], 5).unwrap();
        assert_eq!((r.lhs, r.rhs, r.gap), (1.0, 1.0, 0.0));
        let r = verify_littlewood([0.3, 0.2], 0.0, 40).unwrap();
        assert!((r.rhs - 1.0 / (1.0 - 0.06)).abs() < 1e-15);
        assert!(r.holds(1e-10));
        let r = verify_littlewood([0.4, 0.0], 0.5, 60).unwrap();
        assert!((r.rhs - 1.0 / 0.8).abs() < 1e-15);
        assert!(r.holds(1e-10));
    }

    #[test]
    fn stated_parameter_sets() {
        let r = verify_cauchy([0.2, 0.1], [0.3, 0.25], 60).unwrap();
        assert!(r.holds(1e-10), "{r:?}");
        let r = verify_littlewood([0.3, 0.2], 0.5, 60).unwrap();
        assert!(r.holds(1e-10), "{r:?}");
        let r = verify_rsk_sum([0.2, 0.3], [0.1, 0.4], 0.5, 60).unwrap();
        assert!(r.holds(1e-10), "{r:?}");
    }

    #[test]
    fn cauchy_is_symmetric_exactly() {
        let x = [q(1, 5), q(1, 10)];
        let y = [q(3, 10), q(1, 4)];
        let a = verify_cauchy_exact(x.clone(), y.clone(), 30).unwrap();
        let b = verify_cauchy_exact(y, x, 30).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rsk_degenerations() {
        let x = [q(1, 5), q(3, 10)];
        let y = [q(1, 10), q(2, 5)];
        let rsk = verify_rsk_sum_exact(x.clone(), y.clone(), q(1, 1), 40).unwrap();
        let cauchy = verify_cauchy_exact(x.clone(), y.clone(), 40).unwrap();
        assert_eq!(rsk.lhs, cauchy.lhs);
        assert_eq!(rsk.rhs, cauchy.rhs);
        let zero = verify_rsk_sum_exact(x, y, q(0, 1), 40).unwrap();
        let p = 0.2 * 0.3 * 0.1 * 0.4;
        assert!((zero.rhs - 1.0 / (1.0 - p)).abs() < 1e-15);
        assert!(zero.holds(1e-10));
    }

    #[test]
    fn signature_identities() {
        let zero = Signature::pair(0, 0);
        let r = verify_signature_identities(&zero, &zero, 0.3, 0.4, 0.5, 80).unwrap();
        assert!((r.cauchy.lhs - 1.0 / (1.0 - 0.12)).abs() < 1e-12);
        assert!(r.cauchy.holds(1e-10) && r.littlewood.holds(1e-10), "{r:?}");
        let r = verify_signature_identities(&Signature::pair(2, 0), &Signature::pair(1, 0), 0.3, 0.4, 0.5, 80)
            .unwrap();
        assert!(r.cauchy.holds(1e-10), "{r:?}");
        let r = verify_signature_identities(&Signature::pair(1, 0), &Signature::pair(1, 0), 0.3, 0.4, 0.5, 80)
            .unwrap();
        assert!(r.littlewood.holds(1e-10), "{r:?}");
        let r = verify_signature_identities(&Signature::pair(3, -2), &Signature::pair(1, -4), 0.6, -0.5, 0.7, 90)
            .unwrap();
        assert!(r.cauchy.holds(1e-10) && r.littlewood.holds(1e-10), "{r:?}");
    }

    #[test]
    fn signature_identity_exact_small_cutoff() {
        let r = verify_signature_identities_exact(
            &Signature::pair(2, 0),
            &Signature::pair(1, 0),
            q(3, 10),
            q(2, 5),
            q(1, 2),
            25,
        )
        .unwrap();
        assert!(r.cauchy.gap <= r.cauchy.tail_bound && r.cauchy.gap < 1e-10, "{r:?}");
        assert!(r.littlewood.gap <= r.littlewood.tail_bound, "{r:?}");
        let rat = verify_cauchy_rational([0.2, 0.1], [0.3, 0.25], 40).unwrap();
        let flt = verify_cauchy([0.2, 0.1], [0.3, 0.25], 40).unwrap();
        assert!((rat.lhs - flt.lhs).abs() < 1e-15);
    }

    #[test]
    fn tail_bound_is_an_upper_bound() {
        // With a tiny cutoff the gap is large but still inside the bound.
        let r = verify_cauchy([0.5, 0.4], [0.6, 0.3], 4).unwrap();
        assert!(r.gap > 1e-3);
        assert!(r.gap <= r.tail_bound);
        let r = verify_rsk_sum([0.5, 0.4], [0.6, 0.3], 0.9, 3).unwrap();
        assert!(r.gap <= r.tail_bound);
        let r = verify_signature_identities(&Signature::pair(1, 0), &Signature::pair(2, 1), 0.7, 0.8, 0.9, 3)
            .unwrap();
        assert!(r.cauchy.gap <= r.cauchy.tail_bound, "{r:?}");
        assert!(r.littlewood.gap <= r.littlewood.tail_bound, "{r:?}");
    }

    #[test]
    fn divergent_parameters_rejected() {
        assert!(verify_cauchy([1.2, 0.1], [0.9, 0.1], 10).is_err());
        assert!(verify_littlewood([0.5, 0.5], 2.5, 10).is_err());
    }
}
