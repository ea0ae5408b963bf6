use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::params::{GaussStudentParams, StudentPairParams};
use super::tails::{alpha_tail_mass, c_tail_mass};
use crate::error::{Error, Result};
use crate::sum::{neumaier, Neumaier};
use crate::specfun::quad::{integrate_finite, log_integral, QuadratureConfig};
use crate::specfun::{ln_1p_exp, ln_beta, ln_gamma, ln_kummer_psi, ln_rising_over_factorial};

/// Largest number of coefficients any sequence routine will produce.
pub const HARD_CAP: usize = 100_000;

pub(crate) fn coeff_cfg() -> QuadratureConfig {
    QuadratureConfig::default().with_rel_tol(1e-13).with_abs_tol(0.0)
}

/// A prefix `values[0..len]` of a mixing law together with the mass of the
/// omitted tail.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSequence {
    pub values: Vec<f64>,
    pub cumulative_mass: f64,
    /// Upper bound on `Σ_{k ≥ len} values_k` of the full law.
    pub tail_bound: f64,
    pub params_digest: String,
}

impl CoefficientSequence {
    fn from_values(values: Vec<f64>, tail: f64, params_digest: String) -> Self {
        let cumulative_mass = neumaier(values.iter().copied());
        // Pad the computed tail by its quadrature tolerance.
        let tail_bound = tail * (1.0 + 1e-9) + 1e-15;
        Self {
            values,
            cumulative_mass,
            tail_bound,
            params_digest,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Running sums `Σ_{j ≤ k} values_j`.
    pub fn cumulative(&self) -> Vec<f64> {
        let mut acc = Neumaier::default();
        self.values
            .iter()
            .map(|&v| {
                acc.add(v);
                acc.value()
            })
            .collect()
    }
}

/// `ln τ_k`, where `α_k = (d/2)_k/k! · τ_k` and
/// `τ_k = γ^{-d}/Γ(ν) ∫_0^∞ a^{ν+d/2-1} e^{-a} (1 + a/γ²)^{-k-d/2} da`.
fn ln_tau(p: &GaussStudentParams, k: u64) -> Result<f64> {
    let (nu, hd, g) = (p.nu(), p.half_d(), p.gamma());
    let ln_g2 = 2.0 * g.ln();
    let power = k as f64 + hd;
    let r = log_integral(
        |s: f64| -s.exp() + (nu + hd) * s - power * ln_1p_exp(s - ln_g2),
        None,
        &coeff_cfg(),
    )?;
    Ok(r.ln_value - ln_gamma(nu) - p.d() as f64 * g.ln())
}

/// `α_k`, the probability that the Gaussian-type mixing index equals `k`.
pub fn alpha_coeff(p: &GaussStudentParams, k: u64) -> Result<f64> {
    if p.gamma() == 0.0 {
        return Ok(if k == 0 { 1.0 } else { 0.0 });
    }
    Ok((ln_rising_over_factorial(p.half_d(), k) + ln_tau(p, k)?).exp())
}

/// `α_k` through the confluent hypergeometric closed form
/// `(d/2)_k/k! · γ^{2ν} Γ(ν+d/2)/Γ(ν) · Ψ(ν+d/2, ν-k+1; γ²)`.
pub fn alpha_coeff_kummer(p: &GaussStudentParams, k: u64) -> Result<f64> {
    if p.gamma() == 0.0 {
        return Ok(if k == 0 { 1.0 } else { 0.0 });
    }
    let (nu, hd, g) = (p.nu(), p.half_d(), p.gamma());
    let ln_psi = ln_kummer_psi(nu + hd, nu - k as f64 + 1.0, g * g)?;
    let ln = ln_rising_over_factorial(hd, k) + 2.0 * nu * g.ln() + ln_gamma(nu + hd) - ln_gamma(nu) + ln_psi;
    Ok(ln.exp())
}

/// `τ_k = α_k k!/(d/2)_k` from the half-line integral.
pub fn tau_coeff(p: &GaussStudentParams, k: u64) -> Result<f64> {
    if p.gamma() == 0.0 {
        return Ok(if k == 0 { 1.0 } else { 0.0 });
    }
    Ok(ln_tau(p, k)?.exp())
}

/// `τ_k` as a moment integral on the unit interval,
/// `γ^{2ν}/Γ(ν) ∫_0^1 (1-v)^{k-ν-1} v^{ν+d/2-1} exp(-γ² v/(1-v)) dv`.
pub fn tau_coeff_unit_interval(p: &GaussStudentParams, k: u64) -> Result<f64> {
    if p.gamma() == 0.0 {
        return Ok(if k == 0 { 1.0 } else { 0.0 });
    }
    let (nu, hd, g) = (p.nu(), p.half_d(), p.gamma());
    let g2 = g * g;
    let a = nu + hd - 1.0;
    let b = k as f64 - nu - 1.0;
    let f = |v: f64| {
        if v >= 1.0 {
            return 0.0;
        }
        let w = 1.0 - v;
        (a * v.ln() + b * w.ln() - g2 * v / w).exp()
    };
    let r = integrate_finite(f, 0.0, 1.0, &coeff_cfg())?;
    if r.value <= 0.0 {
        return Ok(0.0);
    }
    Ok((2.0 * nu * g.ln() - ln_gamma(nu) + r.value.ln()).exp())
}

/// `ln ∫_0^{1/2} [t^A (1-t)^B + t^B (1-t)^A] (1 - t(1-t))^n dt` with
/// `A = μ+d/2-1`, `B = ν+d/2-1`; the folded form of the `c_n` integral.
fn ln_c_integral(p: &StudentPairParams, n: u64) -> Result<f64> {
    let hd = p.half_d();
    let a = p.mu() + hd - 1.0;
    let b = p.nu() + hd - 1.0;
    let nf = n as f64;
    let r = log_integral(
        |s: f64| {
            let t = s.exp();
            let l1 = (-t).ln_1p();
            let x = a * s + b * l1;
            let y = b * s + a * l1;
            let m = x.max(y);
            let lse = m + ((x - m).exp() + (y - m).exp()).ln();
            s + lse + nf * (-t * (1.0 - t)).ln_1p()
        },
        Some(-std::f64::consts::LN_2),
        &coeff_cfg(),
    )?;
    Ok(r.ln_value)
}

/// `c_n`, the probability that the Student-type mixing index equals `n`.
pub fn c_coeff(p: &StudentPairParams, n: u64) -> Result<f64> {
    let ln = -ln_beta(p.nu(), p.mu()) + ln_rising_over_factorial(p.half_d(), n) + ln_c_integral(p, n)?;
    Ok(ln.exp())
}

/// `α_k` for `k` in `range`, in order.
pub fn alpha_values(p: &GaussStudentParams, range: std::ops::Range<u64>) -> Result<Vec<f64>> {
    range.into_par_iter().map(|k| alpha_coeff(p, k)).collect()
}

/// `c_n` for `n` in `range`, in order.
pub fn c_values(p: &StudentPairParams, range: std::ops::Range<u64>) -> Result<Vec<f64>> {
    range.into_par_iter().map(|n| c_coeff(p, n)).collect()
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::domain(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    Ok(())
}

/// Smallest `len ≤ HARD_CAP` with `tail(len) ≤ epsilon`.
fn shortest_prefix(epsilon: f64, tail: impl Fn(usize) -> Result<f64>) -> Result<(usize, f64)> {
    let mut hi = 1usize;
    let mut t_hi = tail(hi)?;
    let mut lo = 0usize;
    while t_hi > epsilon {
        if hi == HARD_CAP {
            return Err(Error::Truncation {
                terms: HARD_CAP,
                tail_bound: t_hi,
                target: epsilon,
            });
        }
        lo = hi;
        hi = (hi * 2).min(HARD_CAP);
        t_hi = tail(hi)?;
    }
    // tail(lo) > epsilon (or lo = 0), tail(hi) <= epsilon.
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        let t = tail(mid)?;
        if t <= epsilon {
            hi = mid;
            t_hi = t;
        } else {
            lo = mid;
        }
    }
    Ok((hi, t_hi))
}

/// Shortest prefix of `{α_k}` whose omitted tail has mass at most `epsilon`.
///
/// The tail mass is computed exactly from the compound negative binomial
/// representation rather than extrapolated, since `α_k` decays only like
/// `k^{-ν-1}`.
pub fn alpha_sequence(p: &GaussStudentParams, epsilon: f64) -> Result<CoefficientSequence> {
    check_epsilon(epsilon)?;
    if p.gamma() == 0.0 {
        return Ok(CoefficientSequence::from_values(vec![1.0], 0.0, p.digest()));
    }
    let (len, tail) = shortest_prefix(epsilon, |len| alpha_tail_mass(p, len as u64))?;
    let values = alpha_values(p, 0..len as u64)?;
    Ok(CoefficientSequence::from_values(values, tail, p.digest()))
}

/// The first `len` coefficients `α_k` with the exact mass of the rest.
pub fn alpha_prefix(p: &GaussStudentParams, len: usize) -> Result<CoefficientSequence> {
    check_len(len)?;
    let values = alpha_values(p, 0..len as u64)?;
    let tail = alpha_tail_mass(p, len as u64)?;
    Ok(CoefficientSequence::from_values(values, tail, p.digest()))
}

/// Shortest prefix of `{c_n}` whose omitted tail has mass at most `epsilon`.
///
/// `c_n` decays like `n^{-1-min(ν,μ)}`, so small `ν` or `μ` with a tight
/// `epsilon` can exceed [`HARD_CAP`] and yields [`Error::Truncation`].
pub fn c_sequence(p: &StudentPairParams, epsilon: f64) -> Result<CoefficientSequence> {
    check_epsilon(epsilon)?;
    let (len, tail) = shortest_prefix(epsilon, |len| c_tail_mass(p, len as u64))?;
    let values = c_values(p, 0..len as u64)?;
    Ok(CoefficientSequence::from_values(values, tail, p.digest()))
}

/// The first `len` coefficients `c_n` with the exact mass of the rest.
pub fn c_prefix(p: &StudentPairParams, len: usize) -> Result<CoefficientSequence> {
    check_len(len)?;
    let values = c_values(p, 0..len as u64)?;
    let tail = c_tail_mass(p, len as u64)?;
    Ok(CoefficientSequence::from_values(values, tail, p.digest()))
}

fn check_len(len: usize) -> Result<()> {
    if len == 0 || len > HARD_CAP {
        return Err(Error::domain(format!("prefix length must lie in [1, {HARD_CAP}], got {len}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn gs(d: usize, nu: f64, gamma: f64) -> GaussStudentParams {
        GaussStudentParams::with_gamma(d, nu, gamma).unwrap()
    }

    fn sp(d: usize, nu: f64, mu: f64) -> StudentPairParams {
        StudentPairParams::new(d, nu, mu).unwrap()
    }

    #[test]
    fn alpha_zero_exponential_integral() {
        // ν = 2, γ = 1, d = 2: α_0 = ∫ e^{-a} a²/(1+a) da = e E1(1)
        let a0 = alpha_coeff(&gs(2, 2.0, 1.0), 0).unwrap();
        assert_relative_eq!(a0, 0.596_347_362_323_194_1, max_relative = 1e-13);
    }

    #[test]
    fn alpha_reference_values() {
        // 30-digit quadrature of the defining integral.
        let cases = [
            (1usize, 2.0, 1.0, 0u64, 0.762_054_692_886_954_7),
            (1, 2.0, 1.0, 1, 0.143_120_548_941_452_37),
            (1, 2.0, 1.0, 5, 0.005_471_638_611_517_103),
            (3, 0.5, 2.0, 0, 0.041_802_752_603_526_55),
            (3, 0.5, 2.0, 10, 0.020_035_983_659_630_368),
            (3, 0.5, 2.0, 100, 0.001_180_291_311_214_328_8),
            (2, 5.0, 0.5, 3, 0.000_347_777_912_068_409_7),
        ];
        for (d, nu, g, k, expect) in cases {
            assert_relative_eq!(alpha_coeff(&gs(d, nu, g), k).unwrap(), expect, max_relative = 1e-12);
        }
    }

    #[test]
    fn alpha_gaussian_limit() {
        let p = gs(1, 2.0, 0.0);
        assert_eq!(alpha_coeff(&p, 0).unwrap(), 1.0);
        assert_eq!(alpha_coeff(&p, 3).unwrap(), 0.0);
        let tiny = gs(1, 2.0, 1e-8);
        assert!(alpha_coeff(&tiny, 0).unwrap() > 1.0 - 1e-15);
        let s = alpha_sequence(&p, 1e-8).unwrap();
        assert_eq!(s.values, vec![1.0]);
    }

    #[test]
    fn alpha_large_nu() {
        let a0 = alpha_coeff(&gs(1, 1.0e6, 1.0), 0).unwrap();
        assert!(a0 >= 1.0 - 1e-6 && a0 <= 1.0);
    }

    #[test]
    fn kummer_form_agrees() {
        for &(d, nu, g) in &[(1usize, 2.0, 1.0), (2, 0.5, 0.1), (3, 5.0, 5.0), (1, 1.5, 2.0)] {
            let p = gs(d, nu, g);
            for k in [0u64, 1, 7, 30, 50] {
                let a = alpha_coeff(&p, k).unwrap();
                let b = alpha_coeff_kummer(&p, k).unwrap();
                assert_relative_eq!(a, b, max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn tau_forms_agree() {
        let p = gs(2, 3.0, 0.7);
        for k in 0..=10 {
            let a = tau_coeff(&p, k).unwrap();
            let b = tau_coeff_unit_interval(&p, k).unwrap();
            assert_relative_eq!(a, b, max_relative = 1e-10);
        }
        let q = gs(1, 2.0, 1.0);
        assert_eq!(tau_coeff(&q, 0).unwrap(), alpha_coeff(&q, 0).unwrap());
        // (1/2)_3/3! = 5/16
        assert_relative_eq!(
            alpha_coeff(&q, 3).unwrap() / (5.0 / 16.0),
            tau_coeff(&q, 3).unwrap(),
            max_relative = 1e-14
        );
    }

    #[test]
    fn c_reference_values() {
        let cauchy = sp(1, 0.5, 0.5);
        assert_relative_eq!(c_coeff(&cauchy, 0).unwrap(), 1.0 / std::f64::consts::PI, max_relative = 1e-13);
        let cases = [
            (1usize, 0.5, 0.5, 1u64, 0.132_629_119_243_246_1),
            (1, 0.5, 0.5, 1000, 1.136_810_408_024_440_6e-5),
            (1, 1.5, 2.5, 0, 0.424_413_181_578_387_6),
            (1, 1.5, 2.5, 10, 0.010_158_723_402_258_218),
            (2, 5.0, 5.0, 4, 0.080_073_177_596_397_41),
        ];
        for (d, nu, mu, n, expect) in cases {
            assert_relative_eq!(c_coeff(&sp(d, nu, mu), n).unwrap(), expect, max_relative = 1e-12);
        }
    }

    #[test]
    fn c_matches_exact_rationals() {
        // ν = μ = 5, d = 2: c_n = Σ_j C(n,j) (-1)^j B(6+j, 6+j) / B(5, 5),
        // evaluated in exact rational arithmetic.
        let p = sp(2, 5.0, 5.0);
        let cases = [
            (0u64, 0.227_272_727_272_727_27),
            (1, 0.174_825_174_825_174_82),
            (100, 1.405_359_062_836_038e-7),
            (327, 1.204_795_141_484_425e-10),
            (786, 6.340_813_003_990_116e-13),
        ];
        for (n, expect) in cases {
            assert_relative_eq!(c_coeff(&p, n).unwrap(), expect, max_relative = 1e-12);
        }
    }

    #[test]
    fn c_symmetry() {
        let p = sp(2, 1.2, 3.4);
        let a = c_coeff(&p, 5).unwrap();
        let b = c_coeff(&p.swapped(), 5).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-14);
    }

    #[test]
    fn c_matches_trinomial_double_series() {
        // c_n = Σ_{k+l=n} d_{k,l} with
        // d_{k,l} = B(ν+d/2, μ+d/2)/(B(ν,μ) k! l!)
        //           (μ+d/2)_{2k} (ν+d/2)_l (d/2)_{k+l} / (μ+ν+d)_{2k+l}.
        use crate::specfun::{ln_beta, ln_gamma};
        let lpoch = |a: f64, n: u64| ln_gamma(a + n as f64) - ln_gamma(a);
        let lfact = |n: u64| ln_gamma(n as f64 + 1.0);
        for &(d, nu, mu) in &[(1usize, 1.5, 2.5), (2, 0.7, 3.0), (3, 2.0, 2.0)] {
            let p = sp(d, nu, mu);
            let hd = d as f64 / 2.0;
            for n in 0..8u64 {
                let mut sum = 0.0;
                for k in 0..=n {
                    let l = n - k;
                    let ln = ln_beta(nu + hd, mu + hd) - ln_beta(nu, mu) - lfact(k) - lfact(l)
                        + lpoch(mu + hd, 2 * k)
                        + lpoch(nu + hd, l)
                        + lpoch(hd, k + l)
                        - lpoch(mu + nu + 2.0 * hd, 2 * k + l);
                    sum += ln.exp();
                }
                assert_relative_eq!(c_coeff(&p, n).unwrap(), sum, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn sequences_meet_tolerance() {
        let s = alpha_sequence(&gs(1, 2.0, 1.0), 1e-8).unwrap();
        assert!(s.cumulative_mass >= 1.0 - 1e-8 && s.cumulative_mass <= 1.0 + 1e-12);
        assert!(s.tail_bound <= 1e-8 * (1.0 + 1e-6));
        assert!(s.tail_bound >= 1.0 - s.cumulative_mass - 1e-12);
        // Shortest: dropping the last term breaks the tolerance.
        let last = *s.values.last().unwrap();
        assert!(s.tail_bound + last > 1e-8);

        let c = c_sequence(&sp(2, 5.0, 5.0), 1e-10).unwrap();
        assert!((c.cumulative_mass + c.tail_bound - 1.0).abs() < 1e-11);
        assert!(c.values.iter().all(|&v| v >= 0.0));
        let mode = c
            .values
            .iter()
            .enumerate()
            .fold((0, 0.0), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc })
            .0;
        assert!(c.values[mode..].windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(c.values[0], c_coeff(&sp(2, 5.0, 5.0), 0).unwrap());
    }

    #[test]
    fn cauchy_pair_sequence_exceeds_cap() {
        // c_n ~ n^{-3/2} here, so a 1e-8 tail needs about 1e16 terms.
        match c_sequence(&sp(1, 0.5, 0.5), 1e-8) {
            Err(Error::Truncation { terms, tail_bound, .. }) => {
                assert_eq!(terms, HARD_CAP);
                assert!(tail_bound > 1e-3);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn epsilon_validation() {
        assert!(alpha_sequence(&gs(1, 2.0, 1.0), 0.0).is_err());
        assert!(c_sequence(&sp(1, 2.0, 1.0), 1.0).is_err());
        assert!(c_prefix(&sp(1, 2.0, 1.0), 0).is_err());
    }
}
