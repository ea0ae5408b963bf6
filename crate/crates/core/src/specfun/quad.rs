//! Adaptive Gauss–Kronrod quadrature.
//!
//! The engine bisects the interval with the largest error estimate until the
//! summed estimate drops below `max(abs_tol, rel_tol * |value|)`. Every piece
//! of a partition is integrated over a unit parameter `s ∈ [0, 1]` through a
//! [`Map`], so finite intervals, half-lines and endpoint-singular integrands
//! all go through the same 21-point rule.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerances for the adaptive integrators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            abs_tol: 1e-15,
            max_subdivisions: 2000,
        }
    }
}

impl QuadratureConfig {
    pub fn new(rel_tol: f64, abs_tol: f64, max_subdivisions: usize) -> Result<Self> {
        let cfg = Self {
            rel_tol,
            abs_tol,
            max_subdivisions,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) {
            return Err(Error::domain("rel_tol must be positive"));
        }
        if !(self.abs_tol >= 0.0) {
            return Err(Error::domain("abs_tol must be non-negative"));
        }
        if self.max_subdivisions < 1 {
            return Err(Error::domain("max_subdivisions must be at least 1"));
        }
        Ok(())
    }
}

/// A quadrature result and its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub err_est: f64,
}

// Kronrod 21-point abscissae; odd indices are the embedded 10-point Gauss nodes.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_980_729_620,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Nodes of the 21-point Kronrod rule on `[-1, 1]` with their Kronrod
/// weights and embedded 10-point Gauss weights (zero off the Gauss nodes),
/// for callers that need a fixed composite rule.
pub(crate) fn kronrod21() -> [(f64, f64, f64); 21] {
    let gauss = |j: usize| if j % 2 == 1 { WG[j / 2] } else { 0.0 };
    std::array::from_fn(|i| {
        if i < 10 {
            (-XGK[i], WGK[i], gauss(i))
        } else if i == 10 {
            (0.0, WGK[10], 0.0)
        } else {
            (XGK[20 - i], WGK[20 - i], gauss(20 - i))
        }
    })
}

/// Parametrisation of one piece of the integration domain over `s ∈ [0, 1]`.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Map {
    /// `x = lo + (hi - lo) s`.
    Linear { lo: f64, hi: f64 },
    /// Smoothstep `x = lo + (hi - lo)(3s² - 2s³)`; turns an endpoint power
    /// singularity `x^p` into `s^(2p+1)`.
    Smooth { lo: f64, hi: f64 },
    /// `x = lo + scale·v/(1-v)` with `v` the smoothstep of `s`.
    Upper { lo: f64, scale: f64 },
    /// `x = hi - scale·v/(1-v)` with `v` the smoothstep of `s`.
    Lower { hi: f64, scale: f64 },
}

impl Map {
    #[inline]
    fn apply(&self, s: f64) -> (f64, f64) {
        match *self {
            Map::Linear { lo, hi } => (lo + (hi - lo) * s, hi - lo),
            Map::Smooth { lo, hi } => {
                let w = hi - lo;
                let dv = 6.0 * s * (1.0 - s);
                let x = if s <= 0.5 {
                    lo + w * s * s * (3.0 - 2.0 * s)
                } else {
                    let t = 1.0 - s;
                    hi - w * t * t * (3.0 - 2.0 * t)
                };
                (x, w * dv)
            }
            Map::Upper { lo, scale } => {
                let (r, dr) = half_line(s);
                (lo + scale * r, scale * dr)
            }
            Map::Lower { hi, scale } => {
                let (r, dr) = half_line(s);
                (hi - scale * r, scale * dr)
            }
        }
    }
}

/// `r = v/(1-v)` with `v = 3s² - 2s³`, and `dr/ds`.
#[inline]
fn half_line(s: f64) -> (f64, f64) {
    let v = s * s * (3.0 - 2.0 * s);
    let t = 1.0 - s;
    let one_minus_v = t * t * (1.0 + 2.0 * s);
    let dv = 6.0 * s * t;
    (v / one_minus_v, dv / (one_minus_v * one_minus_v))
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    piece: usize,
    a: f64,
    b: f64,
    value: f64,
    err: f64,
    floor: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.err.total_cmp(&other.err) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Returns `(value, error estimate, roundoff floor)`.
fn gk21<F: Fn(f64) -> f64>(f: &F, map: &Map, a: f64, b: f64) -> (f64, f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let eval = |s: f64| -> f64 {
        let (x, jac) = map.apply(s);
        let y = f(x);
        if y == 0.0 {
            0.0
        } else {
            y * jac
        }
    };

    let fc = eval(center);
    let mut resk = WGK[10] * fc;
    let mut resg = 0.0;
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = eval(center - dx);
        let f2 = eval(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let reskh = 0.5 * resk;
    let mut resasc = WGK[10] * (fc - reskh).abs();
    for j in 0..10 {
        resasc += WGK[j] * ((fv1[j] - reskh).abs() + (fv2[j] - reskh).abs());
    }

    let dh = half.abs();
    let result = resk * half;
    resabs *= dh;
    resasc *= dh;
    let mut err = ((resk - resg) * half).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    let floor = 50.0 * f64::EPSILON * resabs;
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(floor);
    }
    if !result.is_finite() {
        err = f64::INFINITY;
    }
    (result, err, floor)
}

/// Integrates `f` over the union of the pieces described by `maps`.
pub(crate) fn integrate_pieces<F: Fn(f64) -> f64>(
    f: F,
    maps: &[Map],
    cfg: &QuadratureConfig,
) -> Result<Integral> {
    cfg.validate()?;
    let mut heap = BinaryHeap::with_capacity(maps.len() + cfg.max_subdivisions + 1);
    let mut frozen: Vec<Segment> = Vec::new();
    for (piece, map) in maps.iter().enumerate() {
        let (value, err, floor) = gk21(&f, map, 0.0, 1.0);
        heap.push(Segment {
            piece,
            a: 0.0,
            b: 1.0,
            value,
            err,
            floor,
        });
    }

    let mut subdivisions = 0usize;
    loop {
        let (value, err_est) = totals(heap.iter().chain(frozen.iter()));
        if !value.is_finite() {
            return Err(Error::Convergence {
                value,
                err_est,
                subdivisions,
            });
        }
        let tol = cfg.abs_tol.max(cfg.rel_tol * value.abs());
        if err_est <= tol {
            return Ok(Integral { value, err_est });
        }
        let Some(worst) = heap.pop() else {
            // Only roundoff-limited segments remain.
            return Ok(Integral { value, err_est });
        };
        let mid = 0.5 * (worst.a + worst.b);
        let roundoff_limited = worst.err <= worst.floor * (1.0 + 1e-9);
        if roundoff_limited || (worst.b - worst.a) < 1e-15 || mid <= worst.a || mid >= worst.b {
            frozen.push(worst);
            continue;
        }
        if subdivisions >= cfg.max_subdivisions {
            heap.push(worst);
            let (value, err_est) = totals(heap.iter().chain(frozen.iter()));
            return Err(Error::Convergence {
                value,
                err_est,
                subdivisions,
            });
        }
        subdivisions += 1;
        let map = &maps[worst.piece];
        let (v1, e1, r1) = gk21(&f, map, worst.a, mid);
        let (v2, e2, r2) = gk21(&f, map, mid, worst.b);
        heap.push(Segment {
            piece: worst.piece,
            a: worst.a,
            b: mid,
            value: v1,
            err: e1,
            floor: r1,
        });
        heap.push(Segment {
            piece: worst.piece,
            a: mid,
            b: worst.b,
            value: v2,
            err: e2,
            floor: r2,
        });
    }
}

fn totals<'a>(segments: impl Iterator<Item = &'a Segment>) -> (f64, f64) {
    // Neumaier summation keeps the total stable with many small segments.
    let mut sum = 0.0;
    let mut comp = 0.0;
    let mut err = 0.0;
    for s in segments {
        let t = sum + s.value;
        if sum.abs() >= s.value.abs() {
            comp += (sum - t) + s.value;
        } else {
            comp += (s.value - t) + sum;
        }
        sum = t;
        err += s.err;
    }
    (sum + comp, err)
}

/// `∫_lo^hi f(t) dt`.
///
/// Endpoint singularities of power type `t^p`, `p > -1`, are handled by a
/// smoothstep change of variable before adaptive subdivision.
pub fn integrate_finite<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    cfg: &QuadratureConfig,
) -> Result<Integral> {
    if !lo.is_finite() || !hi.is_finite() {
        return Err(Error::domain("integrate_finite needs finite limits"));
    }
    if lo == hi {
        return Ok(Integral {
            value: 0.0,
            err_est: 0.0,
        });
    }
    integrate_pieces(f, &[Map::Smooth { lo, hi }], cfg)
}

/// `∫_0^∞ f(a) da` through the substitution `a = u/(1-u)`.
pub fn integrate_semi_infinite<F: Fn(f64) -> f64>(
    f: F,
    cfg: &QuadratureConfig,
) -> Result<Integral> {
    integrate_pieces(f, &[Map::Upper { lo: 0.0, scale: 1.0 }], cfg)
}

/// Natural logarithm of an integral whose integrand is only available in
/// log form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct LogIntegral {
    pub ln_value: f64,
    pub rel_err: f64,
}

impl LogIntegral {
    pub fn value(&self) -> f64 {
        self.ln_value.exp()
    }
}

const DROP: f64 = 46.0;

/// `ln ∫ exp(l(s)) ds` over `s ∈ (-∞, s_max]` (or the whole line when
/// `s_max` is `None`).
///
/// Callers pass the log-integrand already written in the log variable
/// `s = ln t`, Jacobian included. The integrand must be unimodal up to
/// features narrower than the scan step; it is normalised by its maximum so
/// neither overflow nor underflow occurs, and the partition is centred on the
/// peak with widths read off the local curvature.
pub(crate) fn log_integral<L: Fn(f64) -> f64>(
    l: L,
    s_max: Option<f64>,
    cfg: &QuadratureConfig,
) -> Result<LogIntegral> {
    let safe = |s: f64| {
        let v = l(s);
        if v.is_nan() {
            f64::NEG_INFINITY
        } else {
            v
        }
    };

    // Coarse scan for the peak.
    let top = s_max.unwrap_or(60.0);
    let step = 1.0;
    let mut best_s = top;
    let mut best = safe(top);
    let mut s = top;
    let bottom = top - 120.0;
    while s > bottom {
        s -= step;
        let v = safe(s);
        if v > best {
            best = v;
            best_s = s;
        }
    }
    if best == f64::INFINITY {
        return Err(Error::domain("log-integrand is infinite"));
    }
    // Still rising at the bottom of the scan: keep walking left.
    if best_s <= bottom + step {
        let mut stride = step;
        let mut s = best_s;
        for _ in 0..40 {
            let next = s - stride;
            let v = safe(next);
            if v < best {
                break;
            }
            best = v;
            best_s = next;
            s = next;
            stride *= 2.0;
        }
    }
    if best == f64::NEG_INFINITY {
        return Ok(LogIntegral {
            ln_value: f64::NEG_INFINITY,
            rel_err: 0.0,
        });
    }

    // Golden-section refinement inside the bracketing grid cell.
    let mut lo = best_s - step;
    let mut hi = match s_max {
        Some(m) => (best_s + step).min(m),
        None => best_s + step,
    };
    let g = 0.618_033_988_749_894_9;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let mut f1 = safe(x1);
    let mut f2 = safe(x2);
    for _ in 0..80 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = safe(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = safe(x1);
        }
    }
    let (peak, m) = [(best_s, best), (x1, f1), (x2, f2)]
        .into_iter()
        .fold((best_s, best), |acc, c| if c.1 > acc.1 { c } else { acc });

    // Local width in s from the curvature at the peak.
    let h = 1e-3;
    let right_ok = s_max.map_or(true, |mx| peak + h <= mx);
    let width = if right_ok {
        let c = (2.0 * m - safe(peak + h) - safe(peak - h)) / (h * h);
        if c.is_finite() && c > 0.0 {
            (1.0 / c.sqrt()).clamp(1e-6, 4.0)
        } else {
            1.0
        }
    } else {
        1.0
    };

    // Extent where the integrand is within e^-DROP of its peak.
    let mut stride = width;
    let mut s_lo = peak - stride;
    let mut left_found = false;
    for _ in 0..64 {
        if safe(s_lo) < m - DROP {
            left_found = true;
            break;
        }
        stride *= 2.0;
        s_lo = peak - stride;
    }
    if !left_found {
        return Err(Error::domain("log-integrand does not decay to the left"));
    }
    let mut s_hi = peak;
    let mut right_open = true;
    match s_max {
        Some(mx) if peak >= mx => {
            right_open = false;
        }
        _ => {
            let mut stride = width;
            let mut found = false;
            for _ in 0..64 {
                let cand = peak + stride;
                if let Some(mx) = s_max {
                    if cand >= mx {
                        s_hi = mx;
                        right_open = false;
                        found = true;
                        break;
                    }
                }
                s_hi = cand;
                if safe(cand) < m - DROP {
                    found = true;
                    break;
                }
                stride *= 2.0;
            }
            if !found {
                return Err(Error::domain("log-integrand does not decay to the right"));
            }
        }
    }

    // Breakpoints at peak ± width·2^j.
    let mut breaks = vec![s_lo];
    let mut k = 0;
    while peak - width * 2f64.powi(k) > s_lo {
        k += 1;
    }
    for e in (0..k).rev() {
        breaks.push(peak - width * 2f64.powi(e));
    }
    if peak > s_lo && peak < s_hi {
        breaks.push(peak);
    }
    let mut e = 0;
    while peak + width * 2f64.powi(e) < s_hi {
        breaks.push(peak + width * 2f64.powi(e));
        e += 1;
    }
    if s_hi > *breaks.last().unwrap() {
        breaks.push(s_hi);
    }

    let mut maps = Vec::with_capacity(breaks.len() + 2);
    let left_scale = ((peak - s_lo) / DROP).max(1e-3);
    maps.push(Map::Lower {
        hi: s_lo,
        scale: left_scale,
    });
    for w in breaks.windows(2) {
        if w[1] > w[0] {
            maps.push(Map::Linear { lo: w[0], hi: w[1] });
        }
    }
    match s_max {
        Some(mx) if s_hi < mx => maps.push(Map::Linear { lo: s_hi, hi: mx }),
        Some(_) => {}
        None if right_open => {
            let right_scale = ((s_hi - peak) / DROP).max(1e-3);
            maps.push(Map::Upper {
                lo: s_hi,
                scale: right_scale,
            });
        }
        None => {}
    }

    // Values of l carry an absolute rounding error of order ε·|l|, which
    // bounds the attainable relative accuracy of the integral.
    let noise = 16.0 * f64::EPSILON * (m.abs() + 1.0);
    let cfg = cfg.with_rel_tol(cfg.rel_tol.max(noise));
    let integral = integrate_pieces(|s| (safe(s) - m).exp(), &maps, &cfg)?;
    if !(integral.value > 0.0) {
        return Ok(LogIntegral {
            ln_value: f64::NEG_INFINITY,
            rel_err: 0.0,
        });
    }
    Ok(LogIntegral {
        ln_value: m + integral.value.ln(),
        rel_err: integral.err_est / integral.value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn fixed_rule_degrees() {
        let rule = kronrod21();
        // Kronrod-21 is exact to degree 31, Gauss-10 to degree 19.
        let k: f64 = rule.iter().map(|&(x, w, _)| w * x.powi(30)).sum();
        let g: f64 = rule.iter().map(|&(x, _, w)| w * x.powi(18)).sum();
        assert_relative_eq!(k, 2.0 / 31.0, max_relative = 1e-14);
        assert_relative_eq!(g, 2.0 / 19.0, max_relative = 1e-14);
    }

    #[test]
    fn constant_on_unit_interval() {
        let r = integrate_finite(|_| 1.0, 0.0, 1.0, &cfg()).unwrap();
        assert_relative_eq!(r.value, 1.0, max_relative = 1e-14);
    }

    #[test]
    fn inverse_sqrt_endpoint_singularity() {
        let r = integrate_finite(|t: f64| t.powf(-0.5), 0.0, 1.0, &cfg()).unwrap();
        assert_relative_eq!(r.value, 2.0, max_relative = 1e-12);
    }

    #[test]
    fn beta_one_one_via_half_powers() {
        // t^{mu-1/2}(1-t)^{nu-1/2} at mu = nu = 1/2 is identically one.
        let (mu, nu) = (0.5f64, 0.5f64);
        let r = integrate_finite(
            |t: f64| t.powf(mu - 0.5) * (1.0 - t).powf(nu - 0.5),
            0.0,
            1.0,
            &cfg(),
        )
        .unwrap();
        assert_relative_eq!(r.value, 1.0, max_relative = 1e-13);
    }

    #[test]
    fn exponential_on_half_line() {
        let r = integrate_semi_infinite(|a: f64| (-a).exp(), &cfg()).unwrap();
        assert_relative_eq!(r.value, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn gamma_integral_on_half_line() {
        let nu = 3.5f64;
        let r = integrate_semi_infinite(|a: f64| (-a).exp() * a.powf(nu - 1.0), &cfg()).unwrap();
        // Γ(3.5) = 15√π/8
        let expect = 15.0 * std::f64::consts::PI.sqrt() / 8.0;
        assert_relative_eq!(r.value, expect, max_relative = 1e-12);
    }

    #[test]
    fn exponential_integral_oracle() {
        // ∫ e^{-a} a²/(1+a) da = e·E1(1)
        let r = integrate_semi_infinite(|a: f64| (-a).exp() * a * a / (1.0 + a), &cfg()).unwrap();
        assert_relative_eq!(r.value, 0.596_347_362_323_194_1, max_relative = 1e-12);
    }

    #[test]
    fn non_convergence_reports_best_estimate() {
        let tight = QuadratureConfig::new(1e-15, 0.0, 3).unwrap();
        let err = integrate_finite(|t: f64| (1.0 / t).sin(), 1e-6, 1.0, &tight).unwrap_err();
        match err {
            Error::Convergence { value, .. } => assert!(value.is_finite()),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn invalid_config_rejected() {
        assert!(QuadratureConfig::new(0.0, 0.0, 10).is_err());
        assert!(QuadratureConfig::new(1e-10, -1.0, 10).is_err());
        assert!(QuadratureConfig::new(1e-10, 0.0, 0).is_err());
    }

    #[test]
    fn log_integral_of_sharp_gamma_kernel() {
        // ∫ e^{-a} a^{ν-1} da = Γ(ν) at ν = 1e4, in s = ln a.
        let nu = 1.0e4f64;
        let r = log_integral(|s: f64| -s.exp() + nu * s, None, &cfg()).unwrap();
        let expect = crate::specfun::ln_gamma(nu);
        assert!((r.ln_value - expect).abs() < 1e-11 * expect.abs());
    }

    #[test]
    fn log_integral_decaying_before_finite_limit() {
        // ∫_0^{1/2} e^{-nt} dt with the integrand negligible well before 1/2.
        let n = 327.0f64;
        let r = log_integral(|s: f64| s - n * s.exp(), Some(-std::f64::consts::LN_2), &cfg()).unwrap();
        assert_relative_eq!(r.value(), -(-n / 2.0).exp_m1() / n, max_relative = 1e-12);
    }

    #[test]
    fn log_integral_on_finite_domain() {
        // ∫_0^1 t^{-1/2} dt = 2, written as ∫ e^{s/2} ds over s ≤ 0.
        let r = log_integral(|s: f64| 0.5 * s, Some(0.0), &cfg()).unwrap();
        assert_relative_eq!(r.value(), 2.0, max_relative = 1e-12);
    }
}
