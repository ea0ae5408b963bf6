use serde::{Deserialize, Serialize};

use crate::specfun::gamma_q;

/// Asymptotic Kolmogorov distribution quantile at level 1%.
pub const KS_C_1PCT: f64 = 1.628;

/// Critical value of the Kolmogorov–Smirnov statistic at level 1% for
/// sample sizes `n` and `m`; pass `m = None` for the one-sample test.
pub fn ks_critical_1pct(n: usize, m: Option<usize>) -> f64 {
    let n = n as f64;
    match m {
        None => KS_C_1PCT / n.sqrt(),
        Some(m) => {
            let m = m as f64;
            KS_C_1PCT * ((n + m) / (n * m)).sqrt()
        }
    }
}

/// `sup_x |F_n(x) - F(x)|`.
pub fn ks_one_sample(data: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut x = data.to_vec();
    x.sort_by(f64::total_cmp);
    let n = x.len() as f64;
    let mut d = 0.0f64;
    for (i, &v) in x.iter().enumerate() {
        let f = cdf(v);
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    d
}

/// `sup_x |F_n(x) - G_m(x)|`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    let (n, m) = (x.len() as f64, y.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < x.len() && j < y.len() {
        let v = x[i].min(y[j]);
        while i < x.len() && x[i] <= v {
            i += 1;
        }
        while j < y.len() && y[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    d
}

/// Pearson chi-square test after pooling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    /// Bins before and after pooling.
    pub bins_requested: usize,
    pub bins_used: usize,
}

/// Minimum expected count per pooled bin.
const MIN_EXPECTED: f64 = 5.0;

/// Pools adjacent bins left to right until each has expected count at
/// least 5 (a short remainder joins the last pooled bin), then computes the
/// statistic with `bins_used - 1` degrees of freedom. `None` when fewer than
/// two bins remain.
pub fn chi_square(observed: &[u64], expected: &[f64]) -> Option<ChiSquare> {
    assert_eq!(observed.len(), expected.len());
    let mut pooled: Vec<(f64, f64)> = Vec::new();
    let (mut o, mut e) = (0.0, 0.0);
    for (&oi, &ei) in observed.iter().zip(expected) {
        o += oi as f64;
        e += ei;
        if e >= MIN_EXPECTED {
            pooled.push((o, e));
            o = 0.0;
            e = 0.0;
        }
    }
    if e > 0.0 || o > 0.0 {
        match pooled.last_mut() {
            Some(last) => {
                last.0 += o;
                last.1 += e;
            }
            None => pooled.push((o, e)),
        }
    }
    if pooled.len() < 2 {
        return None;
    }
    let statistic: f64 = pooled.iter().map(|&(o, e)| (o - e) * (o - e) / e).sum();
    let dof = pooled.len() - 1;
    Some(ChiSquare {
        statistic,
        dof,
        p_value: gamma_q(dof as f64 / 2.0, statistic / 2.0),
        bins_requested: observed.len(),
        bins_used: pooled.len(),
    })
}
