use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Method, ValidationReport};
use crate::densities::{student_cf, StudentPairSeries, TruncationPolicy};
use crate::error::{Error, Result};
use crate::mixing::{c_tail_mass, StudentPairParams, HARD_CAP};
use crate::specfun::beta_reg_xy;
use crate::specfun::quad::kronrod21;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourierSettings {
    /// Required `max |FT(f_Y)(u) - k_ν(u)k_μ(u)|`.
    pub tolerance: f64,
    /// Largest partial sum the check may use.
    pub max_terms: usize,
}

impl Default for FourierSettings {
    fn default() -> Self {
        Self {
            tolerance: 1e-6,
            max_terms: HARD_CAP,
        }
    }
}

/// Chebyshev–Lobatto nodes per interpolation panel.
const CHEB: usize = 32;
/// Ratio of consecutive interpolation panel ends beyond `r = 1`.
const PANEL_RATIO: f64 = 1.189_207_115_002_721; // 2^{1/4}
/// Widest Kronrod panel of the cosine transform.
const MAX_WIDTH: f64 = 0.25;

fn cheb_nodes() -> [f64; CHEB] {
    std::array::from_fn(|j| (std::f64::consts::PI * j as f64 / (CHEB - 1) as f64).cos())
}

/// Barycentric interpolation through Chebyshev–Lobatto values on `[-1, 1]`.
fn cheb_interp(nodes: &[f64; CHEB], values: &[f64], s: f64) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for j in 0..CHEB {
        let diff = s - nodes[j];
        if diff == 0.0 {
            return values[j];
        }
        let mut w = if j % 2 == 0 { 1.0 } else { -1.0 };
        if j == 0 || j == CHEB - 1 {
            w *= 0.5;
        }
        let t = w / diff;
        num += t * values[j];
        den += t;
    }
    num / den
}

/// Smallest `n ≤ cap` with `Σ_{k ≥ n} c_k ≤ target`.
fn terms_needed(p: &StudentPairParams, target: f64, cap: usize) -> Result<(usize, f64)> {
    let mut hi = 64usize.min(cap);
    let mut t_hi = c_tail_mass(p, hi as u64)?;
    let mut lo = 0usize;
    while t_hi > target {
        if hi == cap {
            return Err(Error::Truncation {
                terms: cap,
                tail_bound: t_hi,
                target,
            });
        }
        lo = hi;
        hi = (2 * hi).min(cap);
        t_hi = c_tail_mass(p, hi as u64)?;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        let t = c_tail_mass(p, mid as u64)?;
        if t <= target {
            hi = mid;
            t_hi = t;
        } else {
            lo = mid;
        }
    }
    Ok((hi, t_hi))
}

/// Upper bound on the mass of `P_N = Σ_{n<N} c_n φ_n` outside `[-R, R]`.
/// The mass of `φ_n` beyond `R` is `I_{1/(1+R²)}(η, n + 1/2)`, increasing in
/// `n`, so each dyadic block of indices is bounded by its last member.
fn partial_sum_tail(c: &[f64], eta: f64, radius: f64) -> f64 {
    let x = 1.0 / (1.0 + radius * radius);
    let y = radius * radius * x;
    let mut bound = 0.0;
    let mut lo = 0usize;
    while lo < c.len() {
        let hi = (2 * lo).max(1).min(c.len());
        let mass: f64 = c[lo..hi].iter().sum();
        bound += mass * beta_reg_xy(eta, (hi - 1) as f64 + 0.5, x, y);
        lo = hi;
    }
    bound
}

/// Compares the cosine transform of the series density with
/// `k_ν(u)k_μ(u)` for `d = 1`.
///
/// The transform is taken of the partial sum `P_N`, whose remainder has
/// exact mass `T_N = Σ_{n≥N} c_n` and so moves the transform by at most
/// `T_N`; `N` is the shortest prefix with `T_N ≤ tolerance/4`. `P_N` is
/// tabulated on Chebyshev panels out to a radius beyond which its mass is
/// below `tolerance/8`, and transformed with composite Kronrod-21 panels no
/// wider than 1/4. The notes record each error budget.
pub fn fourier_product_check(nu: f64, mu: f64, u_grid: &[f64], settings: FourierSettings) -> Result<ValidationReport> {
    let tol = settings.tolerance;
    if !(tol > 0.0) {
        return Err(Error::domain(format!("tolerance must be > 0, got {tol}")));
    }
    if let Some(u) = u_grid.iter().find(|u| !(**u >= 0.0) || !u.is_finite()) {
        return Err(Error::domain(format!("frequencies must be finite and >= 0, got {u}")));
    }
    let p = StudentPairParams::new(1, nu, mu)?;
    let cap = settings.max_terms.clamp(1, HARD_CAP);
    let (n_terms, t_n) = terms_needed(&p, tol / 4.0, cap)?;
    let series = StudentPairSeries::new(p, TruncationPolicy::new(0.5, cap)?)?;
    let c = series.coefficients(n_terms)?;

    let mut radius = 8.0;
    let mut outside = partial_sum_tail(&c, p.eta(), radius);
    while outside > tol / 8.0 {
        radius *= 2.0;
        outside = partial_sum_tail(&c, p.eta(), radius);
        if radius > 1e8 {
            return Err(Error::Convergence {
                value: outside,
                err_est: outside,
                subdivisions: 0,
            });
        }
    }

    let mut panels = vec![(0.0, 1.0f64.min(radius))];
    while panels.last().map_or(false, |&(_, hi)| hi < radius) {
        let lo = panels.last().map_or(0.0, |&(_, hi)| hi);
        panels.push((lo, (lo * PANEL_RATIO).min(radius)));
    }
    let nodes = cheb_nodes();
    let to_r = |(lo, hi): (f64, f64), s: f64| 0.5 * (lo + hi) + 0.5 * (hi - lo) * s;
    // Two off-node probes per panel estimate the interpolation error.
    const PROBES: [f64; 2] = [0.371, -0.613];
    let tabulated: Vec<Result<(Vec<f64>, f64)>> = panels
        .par_iter()
        .map(|&pan| {
            let vals = nodes
                .iter()
                .map(|&s| series.partial_sum(to_r(pan, s), n_terms))
                .collect::<Result<Vec<f64>>>()?;
            let mut err = 0.0f64;
            for s in PROBES {
                let direct = series.partial_sum(to_r(pan, s), n_terms)?;
                err = err.max((cheb_interp(&nodes, &vals, s) - direct).abs());
            }
            Ok((vals, err))
        })
        .collect();
    let mut tables = Vec::with_capacity(panels.len());
    let mut interp_budget = 0.0;
    for (pan, t) in panels.iter().zip(tabulated) {
        let (vals, err) = t?;
        interp_budget += 2.0 * (pan.1 - pan.0) * err;
        tables.push(vals);
    }

    // Weighted fine-panel values: (r, Kronrod weight·P, (Kronrod - Gauss) weight·P).
    let rule = kronrod21();
    let mut fine: Vec<Vec<(f64, f64, f64)>> = Vec::new();
    for (pan, vals) in panels.iter().zip(&tables) {
        let width = pan.1 - pan.0;
        let m = (width / MAX_WIDTH).ceil().max(1.0) as usize;
        let h = width / m as f64;
        for i in 0..m {
            let a = pan.0 + i as f64 * h;
            let mut cells = Vec::with_capacity(21);
            for &(x, wk, wg) in &rule {
                let r = a + 0.5 * h * (x + 1.0);
                let s = (2.0 * (r - pan.0) / width - 1.0).clamp(-1.0, 1.0);
                let v = cheb_interp(&nodes, vals, s);
                cells.push((r, 0.5 * h * wk * v, 0.5 * h * (wk - wg) * v));
            }
            fine.push(cells);
        }
    }

    let transformed: Vec<(f64, f64)> = u_grid
        .par_iter()
        .map(|&u| {
            let (mut total, mut err) = (0.0, 0.0);
            for cells in &fine {
                let (mut k, mut e) = (0.0, 0.0);
                for &(r, wk, we) in cells {
                    let c = (u * r).cos();
                    k += wk * c;
                    e += we * c;
                }
                total += k;
                err += e.abs();
            }
            (2.0 * total, 2.0 * err)
        })
        .collect();
    let quad_err = transformed.iter().map(|t| t.1).fold(0.0, f64::max);
    let series_values: Vec<f64> = transformed.iter().map(|t| t.0).collect();
    let oracle_values = u_grid
        .iter()
        .map(|&u| Ok(student_cf(nu, u)? * student_cf(mu, u)?))
        .collect::<Result<Vec<f64>>>()?;
    let mut report = ValidationReport::new(Method::FourierProduct, u_grid.to_vec(), series_values, oracle_values, tol);
    report.notes.push(format!("partial sum terms N={n_terms}, remainder mass T_N={t_n:e}"));
    report.notes.push(format!("truncation radius R={radius}, mass of P_N beyond R <= {outside:e}"));
    report.notes.push(format!("interpolation error <= {interp_budget:e}, quadrature error estimate {quad_err:e}"));
    report.notes.push(format!(
        "total error budget {:e}",
        t_n + outside + interp_budget + quad_err
    ));
    Ok(report)
}
