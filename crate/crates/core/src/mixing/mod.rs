//! Mixing laws of the series representations.
//!
//! `f_Z = Σ α_k g_{k,σ}` for a Gaussian plus a Student vector and
//! `f_Y = Σ c_n φ_{n,ν+μ}` for two Student vectors. The weights are the
//! probabilities of compound negative binomial indices `K` and `N`.

mod coeffs;
mod moments;
mod params;
mod tails;

pub use coeffs::{
    alpha_coeff, alpha_coeff_kummer, alpha_prefix, alpha_sequence, alpha_values, c_coeff, c_prefix,
    c_sequence, c_values, tau_coeff, tau_coeff_unit_interval, CoefficientSequence, HARD_CAP,
};
pub use moments::{alpha_nb_limit, complete_monotonicity_defect, k_moments, monotonicity_defects, n_moments, Moments};
pub use params::{GaussStudentParams, StudentPairParams};
pub use tails::{alpha_tail_factorial_moment, alpha_tail_mass, c_tail_factorial_moment, c_tail_mass};
