//! Modified Bessel function of the second kind.

use super::gamma::ln_gamma;
use super::quad::{log_integral, QuadratureConfig};
use crate::error::{Error, Result};

/// `ln K_ν(u)` for `u > 0`, from `K_ν(u) = ½∫ exp(νt - u cosh t) dt` over the
/// real line. Even in `ν`.
pub fn ln_macdonald_k(nu: f64, u: f64) -> Result<f64> {
    if !nu.is_finite() {
        return Err(Error::domain(format!("Bessel order must be finite, got {nu}")));
    }
    let nu = nu.abs();
    if !(u > 0.0) || !u.is_finite() {
        return Err(Error::domain(format!("Bessel argument must be finite and > 0, got {u}")));
    }
    let cfg = QuadratureConfig::default().with_rel_tol(1e-14);
    let r = log_integral(|t: f64| nu * t - u * t.cosh(), None, &cfg)?;
    Ok(r.ln_value - std::f64::consts::LN_2)
}

/// `K_ν(u)`.
pub fn macdonald_k(nu: f64, u: f64) -> Result<f64> {
    Ok(ln_macdonald_k(nu, u)?.exp())
}

/// Characteristic function of the Student law with `2ν` degrees of freedom
/// in the radial variable: `k_ν(u) = 2^{1-ν} u^ν K_ν(u) / Γ(ν)`, `k_ν(0) = 1`.
pub fn student_cf(nu: f64, u: f64) -> Result<f64> {
    if !(nu > 0.0) || !nu.is_finite() {
        return Err(Error::domain(format!("nu must be finite and > 0, got {nu}")));
    }
    let u = u.abs();
    if u == 0.0 {
        return Ok(1.0);
    }
    if !u.is_finite() {
        return Err(Error::domain("characteristic function argument must be finite"));
    }
    let ln = (1.0 - nu) * std::f64::consts::LN_2 + nu * u.ln() + ln_macdonald_k(nu, u)? - ln_gamma(nu);
    Ok(ln.exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn half_order_closed_form() {
        // K_{1/2}(u) = √(π/(2u)) e^{-u}
        for &u in &[0.01f64, 0.5, 1.0, 7.0, 40.0] {
            let expect = (std::f64::consts::PI / (2.0 * u)).sqrt() * (-u).exp();
            assert_relative_eq!(macdonald_k(0.5, u).unwrap(), expect, max_relative = 1e-13);
        }
    }

    #[test]
    fn tabulated_values() {
        assert_relative_eq!(macdonald_k(0.0, 1.0).unwrap(), 0.421_024_438_240_708_3, max_relative = 1e-13);
        assert_relative_eq!(macdonald_k(1.0, 1.0).unwrap(), 0.601_907_230_197_234_6, max_relative = 1e-13);
        assert_relative_eq!(macdonald_k(2.0, 0.1).unwrap(), 199.503_964_642_114_1, max_relative = 1e-12);
    }

    #[test]
    fn cauchy_cf_is_exponential() {
        for &u in &[1e-6f64, 0.3, 2.0, 10.0] {
            assert_relative_eq!(student_cf(0.5, u).unwrap(), (-u).exp(), max_relative = 1e-13);
            let k = student_cf(0.5, u).unwrap();
            assert_relative_eq!(k * k, (-2.0 * u).exp(), max_relative = 1e-13);
        }
        assert_eq!(student_cf(0.5, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn order_three_halves() {
        // k_{3/2}(u) = (1 + u) e^{-u}
        for &u in &[0.1f64, 1.0, 5.0] {
            assert_relative_eq!(student_cf(1.5, u).unwrap(), (1.0 + u) * (-u).exp(), max_relative = 1e-13);
        }
    }

    #[test]
    fn even_in_order() {
        assert_eq!(macdonald_k(0.7, 1.3).unwrap(), macdonald_k(-0.7, 1.3).unwrap());
    }

    #[test]
    fn recurrence_in_order() {
        for &nu in &[0.3f64, 1.0, 2.2, 5.0] {
            for &u in &[0.1f64, 1.0, 4.0, 10.0] {
                let lhs = macdonald_k(nu + 1.0, u).unwrap();
                let rhs = macdonald_k(nu - 1.0, u).unwrap() + 2.0 * nu / u * macdonald_k(nu, u).unwrap();
                assert_relative_eq!(lhs, rhs, max_relative = 1e-11);
            }
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(macdonald_k(f64::NAN, 1.0).is_err());
        assert!(macdonald_k(1.0, 0.0).is_err());
        assert!(student_cf(0.0, 1.0).is_err());
    }
}
