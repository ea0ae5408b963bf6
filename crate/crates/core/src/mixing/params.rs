use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters of `Z = X + T` with `X ~ N(0, σ² I_d)` and `T` Student with
/// `2ν` degrees of freedom.
///
/// `sigma` is the scale of the Gaussian-type components and `gamma` the
/// parameter of the mixing weights. [`GaussStudentParams::new`] ties them by
/// `γ = 1/(σ√2)`; [`GaussStudentParams::scaled`] describes `a₁X + a₂T` and
/// moves them independently.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussStudentParams {
    d: usize,
    nu: f64,
    sigma: f64,
    gamma: f64,
}

impl GaussStudentParams {
    pub fn new(d: usize, nu: f64, sigma: f64) -> Result<Self> {
        check_dim(d)?;
        check_positive("nu", nu)?;
        check_positive("sigma", sigma)?;
        Ok(Self {
            d,
            nu,
            sigma,
            gamma: 1.0 / (sigma * std::f64::consts::SQRT_2),
        })
    }

    /// Parametrises by `γ` directly; `γ = 0` is the pure-Gaussian limit with
    /// `σ = ∞`, where the mixing law is a point mass at zero.
    pub fn with_gamma(d: usize, nu: f64, gamma: f64) -> Result<Self> {
        check_dim(d)?;
        check_positive("nu", nu)?;
        if !(gamma >= 0.0) || !gamma.is_finite() {
            return Err(Error::domain(format!("gamma must be finite and >= 0, got {gamma}")));
        }
        let sigma = if gamma == 0.0 {
            f64::INFINITY
        } else {
            1.0 / (gamma * std::f64::consts::SQRT_2)
        };
        Ok(Self { d, nu, sigma, gamma })
    }

    /// Law of `a₁X + a₂T`: `σ ↦ |a₁|σ`, `γ ↦ |a₂|γ/|a₁|`.
    pub fn scaled(&self, a1: f64, a2: f64) -> Result<Self> {
        let (a1, a2) = (a1.abs(), a2.abs());
        check_positive("a1", a1)?;
        check_positive("a2", a2)?;
        Ok(Self {
            d: self.d,
            nu: self.nu,
            sigma: a1 * self.sigma,
            gamma: a2 * self.gamma / a1,
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn half_d(&self) -> f64 {
        self.d as f64 / 2.0
    }

    pub fn digest(&self) -> String {
        format!(
            "gauss-student:d={},nu={:e},sigma={:e},gamma={:e}",
            self.d, self.nu, self.sigma, self.gamma
        )
    }
}

/// Parameters of `Y = T₁ + T₂` with `T₁`, `T₂` Student with `2ν` and `2μ`
/// degrees of freedom.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StudentPairParams {
    d: usize,
    nu: f64,
    mu: f64,
}

impl StudentPairParams {
    pub fn new(d: usize, nu: f64, mu: f64) -> Result<Self> {
        check_dim(d)?;
        check_positive("nu", nu)?;
        check_positive("mu", mu)?;
        Ok(Self { d, nu, mu })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// `η = ν + μ`, the shape of the Student-type components.
    pub fn eta(&self) -> f64 {
        self.nu + self.mu
    }

    pub fn half_d(&self) -> f64 {
        self.d as f64 / 2.0
    }

    pub fn swapped(&self) -> Self {
        Self {
            d: self.d,
            nu: self.mu,
            mu: self.nu,
        }
    }

    pub fn digest(&self) -> String {
        format!("student-pair:d={},nu={:e},mu={:e}", self.d, self.nu, self.mu)
    }
}

fn check_dim(d: usize) -> Result<()> {
    if d == 0 {
        return Err(Error::domain("dimension d must be at least 1"));
    }
    Ok(())
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::domain(format!("{name} must be finite and > 0, got {v}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_sigma_relation() {
        let p = GaussStudentParams::new(2, 1.5, 0.8).unwrap();
        assert!((p.gamma() * p.sigma() * std::f64::consts::SQRT_2 - 1.0).abs() < 1e-15);
        let q = GaussStudentParams::with_gamma(1, 2.0, 1.0).unwrap();
        assert!((q.sigma() - 1.0 / std::f64::consts::SQRT_2).abs() < 1e-15);
        assert!(GaussStudentParams::with_gamma(1, 2.0, 0.0).unwrap().sigma().is_infinite());
    }

    #[test]
    fn scaling() {
        let p = GaussStudentParams::new(1, 2.0, 1.0).unwrap();
        let s = p.scaled(2.0, 3.0).unwrap();
        assert_eq!(s.sigma(), 2.0);
        assert!((s.gamma() - 3.0 * p.gamma() / 2.0).abs() < 1e-15);
        assert_eq!(p.scaled(-2.0, -3.0).unwrap(), s);
        assert_eq!(p.scaled(1.0, 1.0).unwrap(), p);
        assert!(p.scaled(0.0, 1.0).is_err());
    }

    #[test]
    fn validation() {
        assert!(GaussStudentParams::new(0, 1.0, 1.0).is_err());
        assert!(GaussStudentParams::new(1, 0.0, 1.0).is_err());
        assert!(GaussStudentParams::new(1, 1.0, -1.0).is_err());
        assert!(GaussStudentParams::with_gamma(1, 1.0, f64::NAN).is_err());
        assert!(StudentPairParams::new(1, 1.0, 0.0).is_err());
        assert!(StudentPairParams::new(1, f64::INFINITY, 1.0).is_err());
        let p = StudentPairParams::new(3, 1.2, 3.4).unwrap();
        assert_eq!(p.eta(), 1.2 + 3.4);
        assert_eq!(p.swapped().nu(), 3.4);
    }
}
