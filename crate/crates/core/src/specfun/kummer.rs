//! Confluent hypergeometric function of the second kind.

use super::gamma::ln_gamma;
use super::quad::{log_integral, QuadratureConfig};
use crate::error::{Error, Result};

/// `ln Ψ(a, b; z)` for `a > 0`, `z > 0`, from
/// `Ψ(a, b; z) = Γ(a)^{-1} ∫_0^∞ e^{-zt} t^{a-1} (1+t)^{b-a-1} dt`.
pub fn ln_kummer_psi(a: f64, b: f64, z: f64) -> Result<f64> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::domain(format!("Kummer a must be finite and > 0, got {a}")));
    }
    if !b.is_finite() {
        return Err(Error::domain("Kummer b must be finite"));
    }
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::domain(format!("Kummer z must be finite and > 0, got {z}")));
    }
    let cfg = QuadratureConfig::default().with_rel_tol(1e-14);
    let c = b - a - 1.0;
    let r = log_integral(
        |s: f64| {
            let t = s.exp();
            -z * t + a * s + c * ln_1p_exp(s)
        },
        None,
        &cfg,
    )?;
    Ok(r.ln_value - ln_gamma(a))
}

/// `Ψ(a, b; z)`.
pub fn kummer_psi(a: f64, b: f64, z: f64) -> Result<f64> {
    Ok(ln_kummer_psi(a, b, z)?.exp())
}

/// `ln(1 + e^s)` without overflow.
#[inline]
pub(crate) fn ln_1p_exp(s: f64) -> f64 {
    if s > 35.0 {
        s + (-s).exp()
    } else {
        s.exp().ln_1p()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exponential_integral_case() {
        // Ψ(1, 1; 1) = e E1(1)
        assert_relative_eq!(kummer_psi(1.0, 1.0, 1.0).unwrap(), 0.596_347_362_323_194_1, max_relative = 1e-13);
    }

    #[test]
    fn power_case() {
        // Ψ(a, a+1; z) = z^{-a}
        for &(a, z) in &[(0.5f64, 2.0f64), (3.0, 0.7), (7.5, 11.0)] {
            assert_relative_eq!(kummer_psi(a, a + 1.0, z).unwrap(), z.powf(-a), max_relative = 1e-13);
        }
    }

    #[test]
    fn kummer_transformation() {
        // Ψ(a, b; z) = z^{1-b} Ψ(a-b+1, 2-b; z)
        let (a, b, z) = (2.5f64, 0.3f64, 1.7f64);
        let lhs = kummer_psi(a, b, z).unwrap();
        let rhs = z.powf(1.0 - b) * kummer_psi(a - b + 1.0, 2.0 - b, z).unwrap();
        assert_relative_eq!(lhs, rhs, max_relative = 1e-12);
    }

    #[test]
    fn very_negative_b() {
        // Ψ(a, b; z) with b = a + 1 - n at large n: the polynomial case
        // Ψ(-n...) is excluded, so compare against the transformation instead.
        let (a, b, z) = (1.5f64, -40.0f64, 0.5f64);
        let lhs = ln_kummer_psi(a, b, z).unwrap();
        let rhs = (1.0 - b) * z.ln() + ln_kummer_psi(a - b + 1.0, 2.0 - b, z).unwrap();
        assert!((lhs - rhs).abs() < 1e-11 * lhs.abs().max(1.0));
    }
}
