use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::specfun::quad::{log_integral, QuadratureConfig};
use crate::specfun::{ln_beta, ln_gamma, ln_gamma_ratio};

pub(crate) fn check_radius(r: f64) -> Result<()> {
    if !(r >= 0.0) || r.is_infinite() {
        return Err(Error::domain(format!("radius must be finite and >= 0, got {r}")));
    }
    Ok(())
}

pub(crate) fn check_dim(d: usize) -> Result<()> {
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

/// `ln A_{ν,d}` with `A_{ν,d} = Γ(ν+d/2)/(Γ(ν) π^{d/2})`.
fn ln_student_const(nu: f64, hd: f64) -> f64 {
    ln_gamma_ratio(nu + hd, nu) - hd * PI.ln()
}

/// Student density with `2ν` degrees of freedom, `A_{ν,d}(1+r²)^{-ν-d/2}`.
pub fn student_density(nu: f64, d: usize, r: f64) -> Result<f64> {
    check_positive("nu", nu)?;
    check_dim(d)?;
    check_radius(r)?;
    let hd = d as f64 / 2.0;
    Ok((ln_student_const(nu, hd) - (nu + hd) * (r * r).ln_1p()).exp())
}

/// `ln g_{k,σ}(r)`; `-∞` where the density vanishes.
pub(crate) fn ln_g(k: u64, sigma: f64, hd: f64, r: f64) -> f64 {
    let x = r * r / (2.0 * sigma * sigma);
    let base = -hd * (2.0 * PI * sigma * sigma).ln() - x;
    if k == 0 {
        return base;
    }
    if x == 0.0 {
        return f64::NEG_INFINITY;
    }
    base + k as f64 * x.ln() - ln_gamma_ratio(k as f64 + hd, hd)
}

/// `g_{k,σ}(r) = Γ(d/2)/(Γ(k+d/2)(σ√(2π))^d) x^k e^{-x}`, `x = r²/(2σ²)`:
/// the density of `σ‖X_{2k+d}‖U_d`.
pub fn g_component(k: u64, sigma: f64, d: usize, r: f64) -> Result<f64> {
    check_positive("sigma", sigma)?;
    check_dim(d)?;
    check_radius(r)?;
    Ok(ln_g(k, sigma, d as f64 / 2.0, r).exp())
}

/// `ln φ_{n,η}(r)`; `-∞` where the density vanishes.
pub(crate) fn ln_phi(n: u64, eta: f64, hd: f64, r: f64) -> f64 {
    let nf = n as f64;
    let r2 = r * r;
    if n > 0 && r2 == 0.0 {
        return f64::NEG_INFINITY;
    }
    let mut ln = ln_gamma(hd) - hd * PI.ln() - ln_beta(eta, nf + hd) - (eta + nf + hd) * r2.ln_1p();
    if n > 0 {
        ln += nf * r2.ln();
    }
    ln
}

/// `φ_{n,η}(r) = Γ(d/2)/(π^{d/2} B(η, n+d/2)) · r^{2n}/(1+r²)^{η+n+d/2}`:
/// the density of `‖T_{2n+d}‖U_d`.
pub fn phi_component(n: u64, eta: f64, d: usize, r: f64) -> Result<f64> {
    check_positive("eta", eta)?;
    check_dim(d)?;
    check_radius(r)?;
    Ok(ln_phi(n, eta, d as f64 / 2.0, r).exp())
}

/// `|∫_0^∞ g_t(r) dγ̃_ν(t) - f_ν(r)|`, where `g_t` is the heat kernel
/// `(4πt)^{-d/2} e^{-r²/(4t)}` and `dγ̃_ν(t) = e^{-1/(4t)} t^{-ν-1} dt / (4^ν Γ(ν))`
/// is inverse Gamma with shape `ν` and scale `1/4`.
pub fn subordination_check(nu: f64, d: usize, r: f64) -> Result<f64> {
    check_positive("nu", nu)?;
    check_dim(d)?;
    check_radius(r)?;
    let hd = d as f64 / 2.0;
    let c = 0.25 * (1.0 + r * r);
    let norm = -hd * (4.0 * PI).ln() - 2.0 * nu * std::f64::consts::LN_2 - ln_gamma(nu);
    // In s = ln t, including the Jacobian t.
    let l = |s: f64| norm - c * (-s).exp() - (nu + hd) * s;
    let cfg = QuadratureConfig::default().with_rel_tol(1e-13);
    let integral = log_integral(l, None, &cfg)?.value();
    Ok((integral - student_density(nu, d, r)?).abs())
}
