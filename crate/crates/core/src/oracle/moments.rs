use serde::{Deserialize, Serialize};

use super::{Method, ValidationReport};
use crate::error::{Error, Result};
use crate::mixing::{
    alpha_tail_factorial_moment, alpha_values, c_tail_factorial_moment, c_values, k_moments, monotonicity_defects,
    n_moments, GaussStudentParams, Moments, StudentPairParams,
};
use crate::sum::neumaier;

/// Either mixing law, with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum Family {
    Alpha(GaussStudentParams),
    C(StudentPairParams),
}

impl Family {
    fn values(&self, len: usize) -> Result<Vec<f64>> {
        match self {
            Family::Alpha(p) => alpha_values(p, 0..len as u64),
            Family::C(p) => c_values(p, 0..len as u64),
        }
    }
}

/// Mean and variance from an explicit prefix of length `len` plus the exact
/// factorial-moment tails beyond it.
fn assemble(values: &[f64], tail: impl Fn(u32) -> Result<f64>) -> Result<Moments> {
    let len = values.len();
    let head1 = neumaier((0..len).map(|k| k as f64 * values[k]));
    let head2 = neumaier((0..len).map(|k| k as f64 * (k as f64 - 1.0) * values[k]));
    let mean = head1 + tail(1)?;
    let variance = match tail(2) {
        Ok(t2) => Some(head2 + t2 + mean - mean * mean),
        Err(Error::MomentUndefined { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(Moments { mean, variance })
}

/// Moments of `K` as series sums `Σ k α_k`, `Σ k² α_k`.
pub fn alpha_series_moments(p: &GaussStudentParams, len: usize) -> Result<Moments> {
    let values = alpha_values(p, 0..len as u64)?;
    assemble(&values, |order| alpha_tail_factorial_moment(p, len as u64, order))
}

/// Moments of `N` as series sums `Σ n c_n`, `Σ n² c_n`.
pub fn c_series_moments(p: &StudentPairParams, len: usize) -> Result<Moments> {
    let values = c_values(p, 0..len as u64)?;
    assemble(&values, |order| c_tail_factorial_moment(p, len as u64, order))
}

/// Series mean and variance (prefix of `len` terms plus exact tails) against
/// the closed forms. The grid holds the moment order (1 for the mean, 2 for
/// the variance when it exists); passes when `max_rel_err ≤ rel_tol`.
pub fn moments_check(family: &Family, len: usize, rel_tol: f64) -> Result<ValidationReport> {
    let (series, exact) = match family {
        Family::Alpha(p) => (alpha_series_moments(p, len)?, k_moments(p)?),
        Family::C(p) => (c_series_moments(p, len)?, n_moments(p)?),
    };
    let mut grid = vec![1.0];
    let mut s = vec![series.mean];
    let mut o = vec![exact.mean];
    if let (Some(a), Some(b)) = (series.variance, exact.variance) {
        grid.push(2.0);
        s.push(a);
        o.push(b);
    }
    let mut report = ValidationReport::new(Method::ClosedFormMoments, grid, s, o, f64::INFINITY);
    report.passed = report.max_rel_err <= rel_tol;
    if exact.variance.is_none() {
        report.notes.push("variance undefined for these parameters".into());
    }
    Ok(report)
}

/// `(-1)^m Δ^m` of the first `len` coefficients for `m = 1..=max_order`. The
/// grid holds `m`, the series values the worst negative part at that order
/// and the oracle values zero; passes when every defect is at most `tol`.
pub fn monotonicity_check(family: &Family, len: usize, max_order: usize, tol: f64) -> Result<ValidationReport> {
    if len < 2 || max_order == 0 {
        return Err(Error::domain(format!(
            "need at least 2 coefficients and order >= 1, got len={len}, max_order={max_order}"
        )));
    }
    let values = family.values(len)?;
    let defects = monotonicity_defects(&values, max_order);
    let grid = (1..=max_order).map(|m| m as f64).collect();
    let zeros = vec![0.0; max_order];
    let mut report = ValidationReport::new(Method::CompleteMonotonicity, grid, defects, zeros, tol);
    report.notes.push(format!("indices 0..{len}"));
    Ok(report)
}
