//! Independent references for the series: direct convolution quadrature,
//! Fourier products of characteristic functions, Monte Carlo histograms,
//! exact ball masses, and goodness-of-fit statistics.

mod convolution;
mod fourier;
mod mass;
mod montecarlo;
mod moments;
mod stats;

use serde::{Deserialize, Serialize};

pub use convolution::{convolution_density_1d, convolve_quadrature_1d};
pub use fourier::{fourier_product_check, FourierSettings};
pub use mass::{normalization_check, tail_mass, NormalizationReport};
pub use montecarlo::{mc_density_check, radial_bin_edges};
pub use moments::{alpha_series_moments, c_series_moments, moments_check, monotonicity_check, Family};
pub use stats::{chi_square, ks_critical_1pct, ks_one_sample, ks_two_sample, ChiSquare, KS_C_1PCT};

/// Significance level of every statistical check.
pub const TEST_LEVEL: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    QuadratureConvolution,
    MonteCarlo,
    FourierProduct,
    ClosedFormMoments,
    CompleteMonotonicity,
}

/// Series values against oracle values on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub method: Method,
    pub grid: Vec<f64>,
    pub series_values: Vec<f64>,
    pub oracle_values: Vec<f64>,
    pub max_abs_err: f64,
    pub max_rel_err: f64,
    /// Goodness-of-fit statistic for Monte Carlo reports.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chi_square: Option<ChiSquare>,
    pub passed: bool,
    pub notes: Vec<String>,
}

impl ValidationReport {
    /// Report with errors computed from the arrays and `passed` set by
    /// `max_abs_err ≤ tolerance`.
    pub fn new(method: Method, grid: Vec<f64>, series_values: Vec<f64>, oracle_values: Vec<f64>, tolerance: f64) -> Self {
        let mut max_abs_err = 0.0f64;
        let mut max_rel_err = 0.0f64;
        for (s, o) in series_values.iter().zip(&oracle_values) {
            let e = (s - o).abs();
            max_abs_err = max_abs_err.max(e);
            if *o != 0.0 {
                max_rel_err = max_rel_err.max(e / o.abs());
            }
        }
        Self {
            method,
            grid,
            series_values,
            oracle_values,
            max_abs_err,
            max_rel_err,
            chi_square: None,
            passed: max_abs_err <= tolerance,
            notes: Vec::new(),
        }
    }
}
