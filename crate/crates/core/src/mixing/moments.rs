use serde::{Deserialize, Serialize};

use super::params::{GaussStudentParams, StudentPairParams};
use crate::error::{Error, Result};
use crate::specfun::{ln_beta, ln_rising_over_factorial};

/// Mean and, when it exists, variance of a mixing index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub mean: f64,
    pub variance: Option<f64>,
}

/// Closed-form mean and variance of `K`:
/// `EK = dγ²/(2ν-2)` for `ν > 1`,
/// `Var K = dγ²/(2(ν-1)) · [1 + (γ²/2)(d + 2(ν-1))/((ν-1)(ν-2))]` for `ν > 2`.
pub fn k_moments(p: &GaussStudentParams) -> Result<Moments> {
    let (nu, d, g2) = (p.nu(), p.d() as f64, p.gamma() * p.gamma());
    if g2 == 0.0 {
        return Ok(Moments {
            mean: 0.0,
            variance: Some(0.0),
        });
    }
    if nu <= 1.0 {
        return Err(Error::MomentUndefined {
            moment: "mean",
            reason: format!("E K requires nu > 1, got {nu}"),
        });
    }
    let mean = d * g2 / (2.0 * nu - 2.0);
    let variance = (nu > 2.0)
        .then(|| mean * (1.0 + 0.5 * g2 * (d + 2.0 * (nu - 1.0)) / ((nu - 1.0) * (nu - 2.0))));
    Ok(Moments { mean, variance })
}

/// Closed-form mean and variance of `N`, with `R₁ = B(ν-1, μ-1)/B(ν, μ)` and
/// `R₂ = B(ν-2, μ-2)/B(ν, μ)`:
/// `EN = (d/2)(R₁ - 1)`, `Var N = (d/4)[(d+2)R₂ - 2R₁ - dR₁²]`.
pub fn n_moments(p: &StudentPairParams) -> Result<Moments> {
    let (nu, mu, d) = (p.nu(), p.mu(), p.d() as f64);
    let lo = nu.min(mu);
    if lo <= 1.0 {
        return Err(Error::MomentUndefined {
            moment: "mean",
            reason: format!("E N requires nu, mu > 1, got ({nu}, {mu})"),
        });
    }
    let lb = ln_beta(nu, mu);
    let r1 = (ln_beta(nu - 1.0, mu - 1.0) - lb).exp();
    let mean = 0.5 * d * (r1 - 1.0);
    let variance = (lo > 2.0).then(|| {
        let r2 = (ln_beta(nu - 2.0, mu - 2.0) - lb).exp();
        0.25 * d * ((d + 2.0) * r2 - 2.0 * r1 - d * r1 * r1)
    });
    Ok(Moments { mean, variance })
}

/// Negative binomial `NB(d/2, 1/(1+x))` probability of `k`, the large-`ν`
/// limit of `α_k` along `γ² = x(ν-1)`:
/// `Γ(k+d/2)/(k! Γ(d/2)) x^k (1+x)^{-k-d/2}`.
pub fn alpha_nb_limit(k: u64, d: usize, x: f64) -> Result<f64> {
    if d == 0 {
        return Err(Error::domain("dimension d must be at least 1"));
    }
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(format!("eta_over_sigma_sq must be finite and > 0, got {x}")));
    }
    let hd = d as f64 / 2.0;
    let kf = k as f64;
    let ln = ln_rising_over_factorial(hd, k) + kf * x.ln() - (kf + hd) * x.ln_1p();
    Ok(ln.exp())
}

/// Per order `m = 1..=max_order`, `max_k max(0, -(-1)^m Δ^m v_k)` over all
/// differences that fit inside `values`.
pub fn monotonicity_defects(values: &[f64], max_order: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(max_order);
    let mut diff: Vec<f64> = values.to_vec();
    for _m in 1..=max_order {
        // Replace v by -Δv, so after m steps diff holds (-1)^m Δ^m v.
        diff = diff.windows(2).map(|w| w[0] - w[1]).collect();
        out.push(diff.iter().fold(0.0f64, |acc, &v| acc.max(-v)));
    }
    out
}

/// Largest of [`monotonicity_defects`]. Zero for a completely monotone
/// prefix.
pub fn complete_monotonicity_defect(values: &[f64], max_order: usize) -> f64 {
    monotonicity_defects(values, max_order).into_iter().fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn k_moment_examples() {
        let p = GaussStudentParams::with_gamma(1, 2.0, 1.0).unwrap();
        let m = k_moments(&p).unwrap();
        assert_eq!(m.mean, 0.5);
        assert_eq!(m.variance, None);
        let q = GaussStudentParams::with_gamma(1, 3.0, 1.0).unwrap();
        assert_relative_eq!(k_moments(&q).unwrap().variance.unwrap(), 0.5625, max_relative = 1e-15);
        let z = GaussStudentParams::with_gamma(1, 0.5, 0.0).unwrap();
        assert_eq!(k_moments(&z).unwrap(), Moments { mean: 0.0, variance: Some(0.0) });
        let u = GaussStudentParams::with_gamma(1, 1.0, 1.0).unwrap();
        assert!(matches!(k_moments(&u), Err(Error::MomentUndefined { .. })));
    }

    #[test]
    fn n_moment_examples() {
        let p = StudentPairParams::new(1, 2.0, 2.0).unwrap();
        let m = n_moments(&p).unwrap();
        assert_relative_eq!(m.mean, 2.5, max_relative = 1e-14);
        assert_eq!(m.variance, None);
        let a = n_moments(&StudentPairParams::new(1, 3.0, 4.0).unwrap()).unwrap();
        let b = n_moments(&StudentPairParams::new(2, 3.0, 4.0).unwrap()).unwrap();
        assert_relative_eq!(b.mean, 2.0 * a.mean, max_relative = 1e-15);
        assert!(n_moments(&StudentPairParams::new(1, 0.9, 4.0).unwrap()).is_err());
    }

    #[test]
    fn nb_limit_examples() {
        assert_relative_eq!(alpha_nb_limit(0, 2, 1.0).unwrap(), 0.5, max_relative = 1e-15);
        let total: f64 = (0..=200).map(|k| alpha_nb_limit(k, 1, 3.0).unwrap()).sum();
        // Omitted mass beyond k = 200 is about (3/4)^200.
        assert!((total - 1.0).abs() < 1e-12);
        assert!(alpha_nb_limit(0, 1, 0.0).is_err());
    }

    #[test]
    fn monotonicity_defect_examples() {
        assert_eq!(complete_monotonicity_defect(&[1.0; 20], 6), 0.0);
        let moments: Vec<f64> = (0..20).map(|k| 1.0 / (k as f64 + 1.0)).collect();
        assert_eq!(complete_monotonicity_defect(&moments, 6), 0.0);
        let bumpy = [1.0, 0.5, 0.6, 0.1];
        assert_relative_eq!(complete_monotonicity_defect(&bumpy, 1), 0.1, max_relative = 1e-12);
        let per = monotonicity_defects(&bumpy, 5);
        assert_eq!(per.len(), 5);
        assert_eq!(per[4], 0.0);
    }
}
