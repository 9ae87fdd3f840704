use super::params::{GeoParams, LgParams, PathWord, Step, TwoLayerPath};
use crate::error::{Error, Result};

fn check_shape<T>(path: &TwoLayerPath<T>, word: &PathWord, n: usize) -> Result<()> {
    if path.states.len() != n + 1 || word.len() != n {
        return Err(Error::InvalidArgument(format!(
            "path with {} states and word of length {} for {} sites",
            path.states.len(),
            word.len(),
            n
        )));
    }
    Ok(())
}

/// One-variable skew factor log s_{μ/λ}(a) = (|μ| − |λ|) log a on λ ≺ μ.
pub(crate) fn log_skew_one(lambda: [i64; 2], mu: [i64; 2], a: f64) -> f64 {
    let interlaced = mu[0] >= lambda[0] && lambda[0] >= mu[1] && mu[1] >= lambda[1];
    if !interlaced {
        return f64::NEG_INFINITY;
    }
    let d = (mu[0] + mu[1] - lambda[0] - lambda[1]) as f64;
    if d == 0.0 {
        0.0
    } else {
        d * a.ln()
    }
}

/// Unnormalised log-weight c₁^{λ₁⁰−λ₂⁰} c₂^{λ₁ᴺ−λ₂ᴺ} ∏ s(aᵢ) of a geometric
/// two-layer path; a Right letter contributes s_{λⁱ/λⁱ⁻¹}(aᵢ), a Down letter
/// s_{λⁱ⁻¹/λⁱ}(aᵢ). Paths that do not interlace get −∞.
pub fn twolayer_logdensity_geo(path: &TwoLayerPath<i64>, word: &PathWord, params: &GeoParams) -> Result<f64> {
    params.validate()?;
    check_shape(path, word, params.n())?;
    let s = &path.states;
    if s[0][1] != 0 {
        return Err(Error::InvalidArgument(format!("path must start with a second part 0, got {:?}", s[0])));
    }
    if s.iter().any(|x| x[0] < x[1]) {
        return Ok(f64::NEG_INFINITY);
    }
    let boundary = |c: f64, gap: i64| if gap == 0 { 0.0 } else { gap as f64 * c.ln() };
    let mut w = boundary(params.c1, s[0][0] - s[0][1]) + boundary(params.c2, s[params.n()][0] - s[params.n()][1]);
    for (i, step) in word.letters.iter().enumerate() {
        w += match step {
            Step::Right => log_skew_one(s[i], s[i + 1], params.a[i]),
            Step::Down => log_skew_one(s[i + 1], s[i], params.a[i]),
        };
        if w == f64::NEG_INFINITY {
            break;
        }
    }
    Ok(w)
}

/// log Ψ^{(2)}_α(x/y) = −α(x₁ + x₂ − y₁ − y₂) − e^{−(x₁−y₁)} − e^{−(x₂−y₂)} − e^{−(y₁−x₂)}.
pub(crate) fn log_baxter2(alpha: f64, x: [f64; 2], y: [f64; 2]) -> f64 {
    -alpha * (x[0] + x[1] - y[0] - y[1]) - (y[0] - x[0]).exp() - (y[1] - x[1]).exp() - (x[1] - y[0]).exp()
}

/// Unnormalised log-density e^{−u(λ₁⁰−λ₂⁰)} e^{−v(λ₁ᴺ−λ₂ᴺ)} ∏ Ψ^{(2)}_{αᵢ}
/// of a log-gamma two-layer path, oriented by the word as in the geometric case.
pub fn twolayer_logdensity_lg(path: &TwoLayerPath<f64>, word: &PathWord, params: &LgParams) -> Result<f64> {
    params.validate()?;
    check_shape(path, word, params.n())?;
    let s = &path.states;
    if s[0][1] != 0.0 {
        return Err(Error::InvalidArgument(format!("path must start with a second part 0, got {:?}", s[0])));
    }
    let n = params.n();
    let mut w = -params.u * (s[0][0] - s[0][1]) - params.v * (s[n][0] - s[n][1]);
    for (i, step) in word.letters.iter().enumerate() {
        w += match step {
            Step::Right => log_baxter2(params.alphas[i], s[i + 1], s[i]),
            Step::Down => log_baxter2(params.alphas[i], s[i], s[i + 1]),
        };
    }
    Ok(if w.is_nan() { f64::NEG_INFINITY } else { w })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::whittaker::baxter_kernel;
    use crate::Complex64;

    #[test]
    fn empty_path_weight() {
        let params = GeoParams::new(vec![], 0.3, 0.4).unwrap();
        let path = TwoLayerPath { states: vec![[3i64, 0]] };
        let w = twolayer_logdensity_geo(&path, &PathWord::horizontal(0), &params).unwrap();
        assert!((w - 3.0 * (0.12f64).ln()).abs() < 1e-14);
    }

    #[test]
    fn single_horizontal_step() {
        let params = GeoParams::new(vec![0.5], 0.3, 0.4).unwrap();
        let path = TwoLayerPath { states: vec![[0i64, 0], [1, 0]] };
        let w = twolayer_logdensity_geo(&path, &PathWord::horizontal(1), &params).unwrap();
        assert!((w.exp() - 0.4 * 0.5).abs() < 1e-15);
        let bad = TwoLayerPath { states: vec![[2i64, 0], [1, 0]] };
        assert_eq!(twolayer_logdensity_geo(&bad, &PathWord::horizontal(1), &params).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn lg_zero_step_and_kernel_agreement() {
        let params = LgParams::new(vec![1.0], 0.5, 0.5).unwrap();
        let path = TwoLayerPath { states: vec![[0.0, 0.0], [0.0, 0.0]] };
        let w = twolayer_logdensity_lg(&path, &PathWord::horizontal(1), &params).unwrap();
        assert!((w + 3.0).abs() < 1e-15);
        let (x, y) = ([0.7, -0.2], [0.1, -0.5]);
        let k = baxter_kernel(Complex64::new(1.3, 0.0), x, y);
        assert!((log_baxter2(1.3, x, y) - k.ln().re).abs() < 1e-13);
    }

    #[test]
    fn normaliser_does_not_depend_on_the_word() {
        // N = 1: with a Down letter the sum runs over λ¹ ≺ λ⁰, which reaches
        // negative parts; the total must still be the partition function.
        let (a, c1, c2) = (0.5, 0.3, 0.4);
        let params = GeoParams::new(vec![a], c1, c2).unwrap();
        let z1 = 1.0 / ((1.0 - c1 * c2) * (1.0 - a * c1) * (1.0 - a * c2));
        for word in [PathWord::horizontal(1), PathWord { letters: vec![Step::Down] }] {
            let mut total = 0.0;
            for l0 in 0..80i64 {
                for m1 in -80..160i64 {
                    for m2 in -160..=m1 {
                        let path = TwoLayerPath { states: vec![[l0, 0], [m1, m2]] };
                        let w = twolayer_logdensity_geo(&path, &word, &params).unwrap();
                        if w.is_finite() {
                            total += w.exp();
                        }
                    }
                }
            }
            assert!((total / z1 - 1.0).abs() < 1e-12, "{word:?}: {total} vs {z1}");
        }
    }
}
