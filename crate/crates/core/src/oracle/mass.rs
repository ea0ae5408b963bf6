use std::cell::RefCell;
use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::densities::{RadialDensity, TruncationPolicy};
use crate::error::{Error, Result};
use crate::law::ConvolutionSpec;
use crate::specfun::quad::{integrate_pieces, log_integral, Map, QuadratureConfig};
use crate::specfun::{beta_reg_xy, gamma_q, ln_beta, ln_gamma};

fn mass_cfg() -> QuadratureConfig {
    QuadratureConfig::default().with_rel_tol(1e-12).with_abs_tol(0.0)
}

/// Surface area `2π^{d/2}/Γ(d/2)` of the unit sphere in `ℝ^d`.
pub(crate) fn sphere_area(d: usize) -> f64 {
    let hd = d as f64 / 2.0;
    2.0 * (hd * PI.ln() - ln_gamma(hd)).exp()
}

/// `Pr{‖W‖ > radius}` for the law of `spec`, computed from the Gaussian
/// scale-mixture form of the summands without the series.
///
/// Given the Gamma mixing variables, `W` is centred Gaussian with variance
/// `v I_d`, so `Pr{‖W‖ > R} = E Q(d/2, R²/(2v))`. For `T₁ + T₂` the sum of the
/// two Gamma variables integrates out in closed form, leaving
/// `E I_{1/(1+R²t(1-t))}(ν+μ, d/2)` with `t ~ Beta(ν, μ)`.
pub fn tail_mass(spec: &ConvolutionSpec, radius: f64) -> Result<f64> {
    if !(radius >= 0.0) || !radius.is_finite() {
        return Err(Error::domain(format!("radius must be finite and >= 0, got {radius}")));
    }
    if radius == 0.0 {
        return Ok(1.0);
    }
    let r2 = radius * radius;
    match *spec {
        ConvolutionSpec::GaussStudent { params: p, .. } => {
            let (nu, hd, s2, g2) = (p.nu(), p.half_d(), p.sigma() * p.sigma(), p.gamma() * p.gamma());
            if g2 == 0.0 {
                return Ok(gamma_q(hd, r2 / (2.0 * s2)));
            }
            let ln_norm = ln_gamma(nu);
            // a ~ Gamma(ν, 1) in s = ln a; v = σ²(1 + γ²/a).
            let l = |s: f64| {
                let a = s.exp();
                let v = s2 * (1.0 + g2 / a);
                nu * s - a - ln_norm + gamma_q(hd, r2 / (2.0 * v)).ln()
            };
            Ok(log_integral(l, None, &mass_cfg())?.value())
        }
        ConvolutionSpec::StudentPair { params: p } => {
            let (nu, mu, hd, eta) = (p.nu(), p.mu(), p.half_d(), p.eta());
            let ln_norm = ln_beta(nu, mu);
            // t ~ Beta(ν, μ) folded onto (0, 1/2], in s = ln t.
            let l = |s: f64| {
                let t = s.exp();
                let l1 = (-t).ln_1p();
                let a = (nu - 1.0) * s + (mu - 1.0) * l1;
                let b = (mu - 1.0) * s + (nu - 1.0) * l1;
                let m = a.max(b);
                let lse = m + ((a - m).exp() + (b - m).exp()).ln();
                let c = r2 * t * (1.0 - t);
                let ib = beta_reg_xy(eta, hd, 1.0 / (1.0 + c), c / (1.0 + c));
                s + lse - ln_norm + ib.ln()
            };
            Ok(log_integral(l, Some(-LN_2), &mass_cfg())?.value())
        }
    }
}

/// Mass of a series density split at `r_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizationReport {
    pub r_max: f64,
    /// `∫_{‖x‖ ≤ r_max}` of the series density.
    pub inner_mass: f64,
    /// [`tail_mass`] beyond `r_max`.
    pub tail_mass: f64,
    pub total: f64,
    pub abs_err: f64,
}

/// Integrates the series density over the ball of radius `r_max` and adds
/// the exact mass outside it.
pub fn normalization_check(spec: &ConvolutionSpec, r_max: f64, tp: TruncationPolicy) -> Result<NormalizationReport> {
    if !(r_max > 0.0) || !r_max.is_finite() {
        return Err(Error::domain(format!("r_max must be finite and > 0, got {r_max}")));
    }
    let density = spec.density(tp)?;
    let d = spec.dimension();
    let area = sphere_area(d);
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let f = |r: f64| match density.eval_radial(r) {
        Ok(v) => area * v * r.powi(d as i32 - 1),
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            0.0
        }
    };
    let mut maps = Vec::new();
    let (mut lo, mut hi) = (0.0, r_max.min(1.0));
    loop {
        maps.push(Map::Linear { lo, hi });
        if hi >= r_max {
            break;
        }
        lo = hi;
        hi = (2.0 * hi).min(r_max);
    }
    let inner = integrate_pieces(f, &maps, &QuadratureConfig::default().with_rel_tol(1e-11));
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let inner_mass = inner?.value;
    let tail = tail_mass(spec, r_max)?;
    let total = inner_mass + tail;
    Ok(NormalizationReport {
        r_max,
        inner_mass,
        tail_mass: tail,
        total,
        abs_err: (total - 1.0).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mixing::{GaussStudentParams, StudentPairParams};
    use approx::assert_relative_eq;

    #[test]
    fn cauchy_pair_tail_is_closed_form() {
        // Cauchy with scale 2: Pr{|Y| > R} = 1 - (2/π) atan(R/2).
        let spec = ConvolutionSpec::student_pair(StudentPairParams::new(1, 0.5, 0.5).unwrap());
        for &r in &[0.5, 2.0, 10.0, 1e3] {
            let exact = 1.0 - 2.0 / PI * (r / 2.0f64).atan();
            assert_relative_eq!(tail_mass(&spec, r).unwrap(), exact, max_relative = 1e-11);
        }
        assert_eq!(tail_mass(&spec, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn pure_gaussian_tail() {
        // a₂ → 0 leaves σN: Pr{‖σN‖ > R} = Q(3/2, R²/(2σ²)).
        let spec = ConvolutionSpec::gauss_student(GaussStudentParams::new(3, 1.5, 0.7).unwrap(), 1.0, 1e-300).unwrap();
        let t = tail_mass(&spec, 1.1).unwrap();
        assert_relative_eq!(t, gamma_q(1.5, 1.21 / (2.0 * 0.49)), max_relative = 1e-10);
    }

    #[test]
    fn series_densities_have_unit_mass() {
        let tp = TruncationPolicy::default();
        let z = ConvolutionSpec::gauss_student(GaussStudentParams::new(1, 2.0, 1.0).unwrap(), 1.0, 1.0).unwrap();
        assert!(normalization_check(&z, 8.0, tp).unwrap().abs_err <= 1e-7);
        let y = ConvolutionSpec::student_pair(StudentPairParams::new(2, 1.5, 0.5).unwrap());
        let rep = normalization_check(&y, 6.0, tp).unwrap();
        assert!(rep.abs_err <= 1e-7, "{rep:?}");
    }

    #[test]
    fn sphere_areas() {
        assert_relative_eq!(sphere_area(1), 2.0, max_relative = 1e-15);
        assert_relative_eq!(sphere_area(2), 2.0 * PI, max_relative = 1e-15);
        assert_relative_eq!(sphere_area(3), 4.0 * PI, max_relative = 1e-15);
    }
}
