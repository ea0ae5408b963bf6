//! Exact tail sums of the mixing laws.
//!
//! Both mixing indices are negative binomial `NB(d/2, p)` given a random
//! success probability `p`, so for `j ∈ {0, 1, 2}`
//!
//! `Σ_{k ≥ L} k(k-1)…(k-j+1) Pr{NB = k} = (r)_j q^j Pr{NB(r+j, p) ≥ L-j}`
//!
//! with `r = d/2`, `q = (1-p)/p` and `Pr{NB(r, p) ≥ m} = I_{1-p}(m, r)`.
//! Averaging over `p` gives the tails of `{α_k}` and `{c_n}` without summing
//! their slowly decaying terms.

use super::coeffs::coeff_cfg;
use super::params::{GaussStudentParams, StudentPairParams};
use crate::error::{Error, Result};
use crate::specfun::quad::log_integral;
use crate::specfun::{beta_reg_xy, ln_beta, ln_gamma};

/// `ln[(r)_j q^j Pr{NB(r+j, p) ≥ len-j}]` with `x = 1-p`, `y = p` and
/// `ln_q = ln(x/y)` supplied by the caller in a cancellation-free form.
fn ln_nb_factorial_tail(r: f64, j: u32, len: u64, x: f64, y: f64, ln_q: f64) -> f64 {
    let jf = j as f64;
    let mut ln = 0.0;
    for i in 0..j {
        ln += (r + i as f64).ln();
    }
    if j > 0 {
        ln += jf * ln_q;
    }
    let m = len as i64 - j as i64;
    if m > 0 {
        ln += beta_reg_xy(m as f64, r + jf, x, y).ln();
    }
    ln
}

fn check_order(order: u32, shape: f64, name: &'static str) -> Result<()> {
    if order > 2 {
        return Err(Error::domain(format!("factorial moment order must be 0, 1 or 2, got {order}")));
    }
    if order > 0 && shape <= order as f64 {
        return Err(Error::MomentUndefined {
            moment: if order == 1 { "mean" } else { "second factorial moment" },
            reason: format!("requires {name} > {order}, got {shape}"),
        });
    }
    Ok(())
}

/// `Σ_{k ≥ len} k^{(order)} α_k` with `k^{(j)}` the falling factorial.
pub fn alpha_tail_factorial_moment(p: &GaussStudentParams, len: u64, order: u32) -> Result<f64> {
    check_order(order, p.nu(), "nu")?;
    if p.gamma() == 0.0 {
        return Ok(if len == 0 && order == 0 { 1.0 } else { 0.0 });
    }
    if len == 0 && order == 0 {
        return Ok(1.0);
    }
    let (nu, r, g2) = (p.nu(), p.half_d(), p.gamma() * p.gamma());
    let ln_g2 = g2.ln();
    let ln_norm = ln_gamma(nu);
    // Mixing over b ~ Gamma(ν, 1), 1 - p = γ²/(γ² + b), in s = ln b.
    let l = |s: f64| {
        let b = s.exp();
        let x = g2 / (g2 + b);
        let y = b / (g2 + b);
        nu * s - b - ln_norm + ln_nb_factorial_tail(r, order, len, x, y, ln_g2 - s)
    };
    Ok(log_integral(l, None, &coeff_cfg())?.value())
}

/// `Σ_{k ≥ len} α_k`.
pub fn alpha_tail_mass(p: &GaussStudentParams, len: u64) -> Result<f64> {
    alpha_tail_factorial_moment(p, len, 0)
}

/// `Σ_{n ≥ len} n^{(order)} c_n` with `n^{(j)}` the falling factorial.
pub fn c_tail_factorial_moment(p: &StudentPairParams, len: u64, order: u32) -> Result<f64> {
    check_order(order, p.nu().min(p.mu()), "min(nu, mu)")?;
    if len == 0 && order == 0 {
        return Ok(1.0);
    }
    let (nu, mu, r) = (p.nu(), p.mu(), p.half_d());
    let ln_norm = ln_beta(nu, mu);
    // Mixing over t ~ Beta(μ, ν) folded onto (0, 1/2], p = t(1-t), in s = ln t.
    let l = |s: f64| {
        let t = s.exp();
        let l1 = (-t).ln_1p();
        let a = (mu - 1.0) * s + (nu - 1.0) * l1;
        let b = (nu - 1.0) * s + (mu - 1.0) * l1;
        let m = a.max(b);
        let lse = m + ((a - m).exp() + (b - m).exp()).ln();
        let y = t * (1.0 - t);
        let x = 1.0 - y;
        let ln_q = x.ln() - (s + l1);
        s + lse - ln_norm + ln_nb_factorial_tail(r, order, len, x, y, ln_q)
    };
    Ok(log_integral(l, Some(-std::f64::consts::LN_2), &coeff_cfg())?.value())
}

/// `Σ_{n ≥ len} c_n`.
pub fn c_tail_mass(p: &StudentPairParams, len: u64) -> Result<f64> {
    c_tail_factorial_moment(p, len, 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mixing::coeffs::{alpha_values, c_values};
    use approx::assert_relative_eq;

    #[test]
    fn alpha_tail_matches_complement_of_prefix() {
        for &(d, nu, g) in &[(1usize, 2.0, 1.0), (3, 0.5, 2.0), (2, 5.0, 0.5)] {
            let p = GaussStudentParams::with_gamma(d, nu, g).unwrap();
            let vals = alpha_values(&p, 0..12).unwrap();
            let mut acc = 0.0;
            for (len, v) in vals.iter().enumerate() {
                let t = alpha_tail_mass(&p, len as u64).unwrap();
                assert_relative_eq!(t, 1.0 - acc, max_relative = 1e-11, epsilon = 1e-13);
                acc += v;
            }
        }
    }

    #[test]
    fn c_tail_matches_complement_of_prefix() {
        for &(d, nu, mu) in &[(1usize, 0.5, 0.5), (2, 1.5, 2.5), (3, 5.0, 0.7)] {
            let p = StudentPairParams::new(d, nu, mu).unwrap();
            let vals = c_values(&p, 0..12).unwrap();
            let mut acc = 0.0;
            for (len, v) in vals.iter().enumerate() {
                let t = c_tail_mass(&p, len as u64).unwrap();
                assert_relative_eq!(t, 1.0 - acc, max_relative = 1e-11, epsilon = 1e-13);
                acc += v;
            }
        }
    }

    #[test]
    fn cauchy_pair_tail_decays_like_inverse_root() {
        let p = StudentPairParams::new(1, 0.5, 0.5).unwrap();
        let t1 = c_tail_mass(&p, 10_000).unwrap();
        let t2 = c_tail_mass(&p, 40_000).unwrap();
        assert_relative_eq!(t1 / t2, 2.0, max_relative = 1e-2);
    }

    #[test]
    fn factorial_moments_from_zero_are_closed_forms() {
        // E K = dγ²/(2ν-2), E K(K-1) = (d/2)(d/2+1) γ⁴ / ((ν-1)(ν-2)).
        let p = GaussStudentParams::with_gamma(2, 3.5, 0.8).unwrap();
        let g2: f64 = 0.8 * 0.8;
        assert_relative_eq!(
            alpha_tail_factorial_moment(&p, 0, 1).unwrap(),
            2.0 * g2 / 5.0,
            max_relative = 1e-11
        );
        assert_relative_eq!(
            alpha_tail_factorial_moment(&p, 0, 2).unwrap(),
            2.0 * g2 * g2 / (2.5 * 1.5),
            max_relative = 1e-11
        );
    }

    #[test]
    fn undefined_moments() {
        let p = GaussStudentParams::with_gamma(1, 1.0, 1.0).unwrap();
        assert!(matches!(
            alpha_tail_factorial_moment(&p, 5, 1),
            Err(Error::MomentUndefined { .. })
        ));
        let q = StudentPairParams::new(1, 3.0, 1.5).unwrap();
        assert!(c_tail_factorial_moment(&q, 5, 1).is_ok());
        assert!(matches!(c_tail_factorial_moment(&q, 5, 2), Err(Error::MomentUndefined { .. })));
    }
}
