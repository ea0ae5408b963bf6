use std::cell::RefCell;

use super::mass::{sphere_area, tail_mass};
use super::stats::chi_square;
use super::{Method, ValidationReport, TEST_LEVEL};
use crate::densities::{RadialDensity, TruncationPolicy};
use crate::error::{Error, Result};
use crate::law::ConvolutionSpec;
use crate::specfun::quad::{integrate_pieces, Map, QuadratureConfig};

/// Finite edges stop at this multiple of the law scale; beyond it the
/// series needs too many terms and the open bin uses the exact tail mass.
const MAX_EDGE: f64 = 16.0;

/// Edges `s·tan(πi/(2·bins))` up to `16s`, closed by `+∞`.
pub fn radial_bin_edges(scale: f64, bins: usize) -> Vec<f64> {
    let mut edges: Vec<f64> = (0..bins)
        .map(|i| scale * (std::f64::consts::FRAC_PI_2 * i as f64 / bins as f64).tan())
        .take_while(|&e| e <= MAX_EDGE * scale)
        .collect();
    edges.push(f64::INFINITY);
    edges
}

fn law_scale(spec: &ConvolutionSpec) -> f64 {
    match spec {
        ConvolutionSpec::GaussStudent { params, .. } => {
            params.sigma() * (1.0 + params.gamma() * std::f64::consts::SQRT_2)
        }
        ConvolutionSpec::StudentPair { .. } => 2.0,
    }
}

/// Pearson test of the radii of `count` direct draws against the radial law
/// `S_d r^{d-1} f(r)` of the series density, on [`radial_bin_edges`] scaled
/// to the law. The outermost bin takes its probability from [`tail_mass`].
/// Passes when the p-value is at least 1%.
pub fn mc_density_check(
    spec: &ConvolutionSpec,
    count: usize,
    seed: u64,
    bins: usize,
    tp: TruncationPolicy,
) -> Result<ValidationReport> {
    if bins < 2 {
        return Err(Error::domain(format!("bins must be at least 2, got {bins}")));
    }
    let edges = radial_bin_edges(law_scale(spec), bins);
    let used = edges.len() - 1;
    let density = spec.density(tp)?;
    let d = spec.dimension();
    let area = sphere_area(d);
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let f = |r: f64| match density.eval_radial(r) {
        Ok(v) => area * v * r.powi(d as i32 - 1),
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            0.0
        }
    };
    let cfg = QuadratureConfig::default().with_rel_tol(1e-10);
    let mut probs = Vec::with_capacity(used);
    for w in edges[..used].windows(2) {
        let p = integrate_pieces(&f, &[Map::Linear { lo: w[0], hi: w[1] }], &cfg)?;
        if let Some(e) = failure.borrow_mut().take() {
            return Err(e);
        }
        probs.push(p.value);
    }
    probs.push(tail_mass(spec, edges[used - 1])?);

    let radii = spec.sample(count, seed)?.norms();
    let mut observed = vec![0u64; used];
    for r in radii {
        let i = edges[1..used].partition_point(|&e| e <= r);
        observed[i] += 1;
    }
    let n = count as f64;
    let expected: Vec<f64> = probs.iter().map(|p| p * n).collect();
    let freqs: Vec<f64> = observed.iter().map(|&o| o as f64 / n).collect();
    let mut report = ValidationReport::new(Method::MonteCarlo, edges[..used].to_vec(), probs, freqs, f64::INFINITY);
    report.notes.push(format!("seed={seed} count={count} law={}", spec.digest()));
    if used < bins {
        report.notes.push(format!(
            "requested {bins} bins; edges beyond r={} merged into the open bin",
            edges[used - 1]
        ));
    }
    if count < 10_000 {
        report.notes.push(format!("count {count} is below the recommended 10000"));
    }
    match chi_square(&observed, &expected) {
        Some(c) => {
            if c.bins_used < used {
                report
                    .notes
                    .push(format!("pooled {used} bins into {} with expected count >= 5", c.bins_used));
            }
            report.passed = c.p_value >= TEST_LEVEL;
            report.chi_square = Some(c);
        }
        None => {
            report.notes.push("pooling left fewer than two bins; no test possible".into());
            report.passed = false;
        }
    }
    Ok(report)
}
