//! Special functions and quadrature.

mod bessel;
mod gamma;
mod kummer;
pub mod quad;

pub use bessel::{ln_macdonald_k, macdonald_k, student_cf};
pub use gamma::{
    beta_reg, beta_reg_complement, beta_reg_xy, gamma, gamma_p, gamma_q, log_beta, log_gamma,
    log_pochhammer,
};
pub(crate) use gamma::{ln_beta, ln_gamma, ln_gamma_ratio, ln_rising_over_factorial};
pub use kummer::{kummer_psi, ln_kummer_psi};
pub(crate) use kummer::ln_1p_exp;
pub use quad::{integrate_finite, integrate_semi_infinite, Integral, QuadratureConfig};
