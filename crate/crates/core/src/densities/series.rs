use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::components::{check_radius, ln_g, ln_phi};
use super::{DensityKind, RadialDensity};
use crate::error::{Error, Result};
use crate::mixing::{
    alpha_tail_mass, alpha_values, c_tail_mass, c_values, GaussStudentParams, StudentPairParams, HARD_CAP,
};
use crate::sum::Neumaier;

/// Stopping rule for pointwise series evaluation.
///
/// Summation stops at the first `K` whose certified remainder
/// `Σ_{k>K} w_k h_k(r)` is at most `epsilon` times the partial sum. More than
/// `hard_cap` terms is a [`Error::Truncation`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationPolicy {
    pub epsilon: f64,
    pub hard_cap: usize,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self {
            epsilon: 1e-12,
            hard_cap: HARD_CAP,
        }
    }
}

impl TruncationPolicy {
    pub fn new(epsilon: f64, hard_cap: usize) -> Result<Self> {
        let p = Self { epsilon, hard_cap };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::domain(format!("epsilon must lie in (0, 1), got {}", self.epsilon)));
        }
        if self.hard_cap == 0 || self.hard_cap > HARD_CAP {
            return Err(Error::domain(format!(
                "hard_cap must lie in [1, {HARD_CAP}], got {}",
                self.hard_cap
            )));
        }
        Ok(())
    }
}

/// A truncated series value with its certificate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesValue {
    pub value: f64,
    /// Upper bound on the omitted remainder.
    pub tail_bound: f64,
    /// Number of summed terms.
    pub terms: usize,
}

/// A mixture `Σ w_k h_k(r)` whose components satisfy
/// `h_{k+1}(r)/h_k(r)` decreasing in `k`.
trait Family: Send + Sync {
    fn weights(&self, range: std::ops::Range<u64>) -> Result<Vec<f64>>;
    fn tail_mass(&self, len: u64) -> Result<f64>;
    fn ln_component(&self, k: u64, r: f64) -> f64;
    /// `ln(h_{k+1}(r)/h_k(r))` for `r > 0`.
    fn ln_ratio(&self, k: u64, r: f64) -> f64;
}

struct GaussFamily {
    p: GaussStudentParams,
}

impl Family for GaussFamily {
    fn weights(&self, range: std::ops::Range<u64>) -> Result<Vec<f64>> {
        alpha_values(&self.p, range)
    }

    fn tail_mass(&self, len: u64) -> Result<f64> {
        alpha_tail_mass(&self.p, len)
    }

    fn ln_component(&self, k: u64, r: f64) -> f64 {
        ln_g(k, self.p.sigma(), self.p.half_d(), r)
    }

    fn ln_ratio(&self, k: u64, r: f64) -> f64 {
        let s = self.p.sigma();
        (r * r / (2.0 * s * s)).ln() - (k as f64 + self.p.half_d()).ln()
    }
}

struct PairFamily {
    p: StudentPairParams,
}

impl Family for PairFamily {
    fn weights(&self, range: std::ops::Range<u64>) -> Result<Vec<f64>> {
        c_values(&self.p, range)
    }

    fn tail_mass(&self, len: u64) -> Result<f64> {
        c_tail_mass(&self.p, len)
    }

    fn ln_component(&self, n: u64, r: f64) -> f64 {
        ln_phi(n, self.p.eta(), self.p.half_d(), r)
    }

    fn ln_ratio(&self, n: u64, r: f64) -> f64 {
        let r2 = r * r;
        r2.ln() - r2.ln_1p() + (self.p.eta() / (n as f64 + self.p.half_d())).ln_1p()
    }
}

#[derive(Default)]
struct Cache {
    weights: Arc<Vec<f64>>,
    /// `tails[j]` bounds `Σ_{k ≥ 2^j} w_k`.
    tails: Vec<f64>,
}

/// Recompute `ln h_k` directly every this many recurrence steps.
const RESYNC: u64 = 64;

struct Series<F> {
    fam: F,
    policy: TruncationPolicy,
    cache: Mutex<Cache>,
}

impl<F: Family> Series<F> {
    fn new(fam: F, policy: TruncationPolicy) -> Result<Self> {
        policy.validate()?;
        Ok(Self {
            fam,
            policy,
            cache: Mutex::new(Cache::default()),
        })
    }

    fn weights(&self, len: usize) -> Result<Arc<Vec<f64>>> {
        let mut cache = self.cache.lock().unwrap_or_else(|e| e.into_inner());
        let have = cache.weights.len();
        if have < len {
            let target = len.max(2 * have).max(64).min(self.policy.hard_cap.max(len));
            let more = self.fam.weights(have as u64..target as u64)?;
            let mut all = Vec::with_capacity(target);
            all.extend_from_slice(&cache.weights);
            all.extend(more);
            cache.weights = Arc::new(all);
        }
        Ok(Arc::clone(&cache.weights))
    }

    /// An upper bound on `Σ_{k ≥ len} w_k`, `len ≥ 1`.
    fn tail_bound(&self, len: usize) -> Result<f64> {
        let j = (usize::BITS - 1 - len.leading_zeros()) as usize;
        let mut cache = self.cache.lock().unwrap_or_else(|e| e.into_inner());
        while cache.tails.len() <= j {
            let i = cache.tails.len();
            // Pad by the quadrature tolerance.
            let t = self.fam.tail_mass(1u64 << i)? * (1.0 + 1e-9);
            cache.tails.push(t);
        }
        Ok(cache.tails[j])
    }

    fn eval(&self, r: f64) -> Result<SeriesValue> {
        check_radius(r)?;
        let w = self.weights(1)?;
        let lead = w[0] * self.fam.ln_component(0, r).exp();
        if r == 0.0 {
            // Every component beyond the first vanishes at the origin.
            return Ok(SeriesValue {
                value: lead,
                tail_bound: 0.0,
                terms: 1,
            });
        }
        let cap = self.policy.hard_cap;
        let mut w = w;
        let mut sum = Neumaier::default();
        let mut ln_h = self.fam.ln_component(0, r);
        let mut k = 0usize;
        loop {
            if k >= w.len() {
                w = self.weights(k + 1)?;
            }
            sum.add(w[k] * ln_h.exp());
            let ln_next = ln_h + self.fam.ln_ratio(k as u64, r);
            // Components are non-increasing from k+1 on once this ratio is ≤ 1.
            if self.fam.ln_ratio(k as u64 + 1, r) <= 0.0 {
                let bound = ln_next.exp() * self.tail_bound(k + 1)?;
                let value = sum.value();
                if bound <= self.policy.epsilon * value {
                    return Ok(SeriesValue {
                        value,
                        tail_bound: bound,
                        terms: k + 1,
                    });
                }
            }
            k += 1;
            if k >= cap {
                let bound = ln_next.exp() * self.tail_bound(k)?;
                return Err(Error::Truncation {
                    terms: cap,
                    tail_bound: bound,
                    target: self.policy.epsilon * sum.value(),
                });
            }
            ln_h = if k as u64 % RESYNC == 0 {
                self.fam.ln_component(k as u64, r)
            } else {
                ln_next
            };
        }
    }

    fn terms(&self, r: f64, count: usize) -> Result<Vec<f64>> {
        check_radius(r)?;
        let w = self.weights(count)?;
        let mut out = Vec::with_capacity(count);
        let mut ln_h = self.fam.ln_component(0, r);
        for k in 0..count {
            if k > 0 {
                ln_h = if k as u64 % RESYNC == 0 || r == 0.0 {
                    self.fam.ln_component(k as u64, r)
                } else {
                    ln_h + self.fam.ln_ratio(k as u64 - 1, r)
                };
            }
            out.push(w[k] * ln_h.exp());
        }
        Ok(out)
    }

    fn partial_sum(&self, r: f64, count: usize) -> Result<f64> {
        let mut acc = Neumaier::default();
        for t in self.terms(r, count)? {
            acc.add(t);
        }
        Ok(acc.value())
    }

    fn eval_grid(&self, rs: &[f64]) -> Result<Vec<f64>> {
        rs.par_iter().map(|&r| self.eval(r).map(|v| v.value)).collect()
    }
}

macro_rules! series_methods {
    () => {
        /// Truncated series value with its remainder bound.
        pub fn eval_detailed(&self, r: f64) -> Result<SeriesValue> {
            self.inner.eval(r)
        }

        /// The first `count` terms `w_k h_k(r)`.
        pub fn terms(&self, r: f64, count: usize) -> Result<Vec<f64>> {
            self.inner.terms(r, count)
        }

        /// The first `len` mixing weights, from the cache.
        pub fn coefficients(&self, len: usize) -> Result<Vec<f64>> {
            Ok(self.inner.weights(len)?[..len].to_vec())
        }

        /// `Σ_{k < count} w_k h_k(r)`.
        pub fn partial_sum(&self, r: f64, count: usize) -> Result<f64> {
            self.inner.partial_sum(r, count)
        }

        /// Values at each radius, evaluated in parallel.
        pub fn eval_grid(&self, rs: &[f64]) -> Result<Vec<f64>> {
            self.inner.eval_grid(rs)
        }

        pub fn policy(&self) -> TruncationPolicy {
            self.inner.policy
        }
    };
}

/// `f_Z = Σ_k α_k g_{k,σ}` for `Z = X + T`, `X ~ N(0, σ²I_d)`,
/// `T ~ t_{2ν}`. Mixing weights and tail checkpoints are cached, so reuse one
/// instance across many radii.
pub struct GaussStudentSeries {
    params: GaussStudentParams,
    inner: Series<GaussFamily>,
}

impl GaussStudentSeries {
    pub fn new(params: GaussStudentParams, policy: TruncationPolicy) -> Result<Self> {
        if !params.sigma().is_finite() {
            return Err(Error::domain("the Gaussian scale sigma must be finite"));
        }
        Ok(Self {
            params,
            inner: Series::new(GaussFamily { p: params }, policy)?,
        })
    }

    /// The law of `a₁X + a₂T`: `σ' = a₁σ`, `γ' = a₂γ/a₁`.
    pub fn scaled(params: &GaussStudentParams, a1: f64, a2: f64, policy: TruncationPolicy) -> Result<Self> {
        Self::new(params.scaled(a1, a2)?, policy)
    }

    pub fn params(&self) -> &GaussStudentParams {
        &self.params
    }

    series_methods!();
}

impl RadialDensity for GaussStudentSeries {
    fn dimension(&self) -> usize {
        self.params.d()
    }

    fn kind(&self) -> DensityKind {
        DensityKind::GaussStudentSum
    }

    fn eval_radial(&self, r: f64) -> Result<f64> {
        self.inner.eval(r).map(|v| v.value)
    }
}

/// `f_Y = Σ_n c_n φ_{n,ν+μ}` for `Y = T₁ + T₂`, `T₁ ~ t_{2ν}`, `T₂ ~ t_{2μ}`.
/// Mixing weights and tail checkpoints are cached, so reuse one instance
/// across many radii.
pub struct StudentPairSeries {
    params: StudentPairParams,
    inner: Series<PairFamily>,
}

impl StudentPairSeries {
    pub fn new(params: StudentPairParams, policy: TruncationPolicy) -> Result<Self> {
        Ok(Self {
            params,
            inner: Series::new(PairFamily { p: params }, policy)?,
        })
    }

    pub fn params(&self) -> &StudentPairParams {
        &self.params
    }

    series_methods!();
}

impl RadialDensity for StudentPairSeries {
    fn dimension(&self) -> usize {
        self.params.d()
    }

    fn kind(&self) -> DensityKind {
        DensityKind::StudentStudentSum
    }

    fn eval_radial(&self, r: f64) -> Result<f64> {
        self.inner.eval(r).map(|v| v.value)
    }
}

/// Density of `a₁X + a₂T` at radius `r`. Builds a fresh series; use
/// [`GaussStudentSeries`] to evaluate many radii.
pub fn fz_density(p: &GaussStudentParams, a1: f64, a2: f64, r: f64, tp: TruncationPolicy) -> Result<f64> {
    GaussStudentSeries::scaled(p, a1, a2, tp)?.eval_radial(r)
}

/// Density of `T₁ + T₂` at radius `r`. Builds a fresh series; use
/// [`StudentPairSeries`] to evaluate many radii.
pub fn fy_density(p: &StudentPairParams, r: f64, tp: TruncationPolicy) -> Result<f64> {
    StudentPairSeries::new(*p, tp)?.eval_radial(r)
}
