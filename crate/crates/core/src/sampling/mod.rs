//! Exact samplers for `Z = X + T`, `Y = T₁ + T₂` and their mixing indices.
//!
//! Draws are generated in chunks of [`CHUNK`] on ChaCha8 streams: chunk `c` of
//! sampler `tag` uses `ChaCha8Rng::seed_from_u64(seed)` with stream
//! `(tag << 40) | c`. Output is therefore bit-identical for a given seed no
//! matter how many threads run, and different samplers sharing a seed use
//! disjoint streams.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Poisson, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mixing::{GaussStudentParams, StudentPairParams};

/// Draws per generator stream.
pub const CHUNK: usize = 1 << 14;

/// Rates above this are returned as their rounded value; the Poisson
/// relative spread there is below `1e-9`.
const POISSON_SATURATION: f64 = 1e18;

#[derive(Debug, Clone, Copy)]
#[repr(u64)]
enum Tag {
    K = 1,
    N = 2,
    Z = 3,
    ZRadial = 4,
    Y = 5,
    YRadial = 6,
    Sphere = 7,
}

/// `count` points in `ℝ^d`, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleBatch {
    pub dimension: usize,
    pub points: Vec<f64>,
    pub seed: u64,
    pub spec_digest: String,
}

impl SampleBatch {
    pub fn len(&self) -> usize {
        self.points.len() / self.dimension
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dimension..(i + 1) * self.dimension]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.points.chunks_exact(self.dimension)
    }

    pub fn norms(&self) -> Vec<f64> {
        self.iter().map(|x| x.iter().map(|v| v * v).sum::<f64>().sqrt()).collect()
    }

    /// The `j`-th coordinate of every point.
    pub fn coordinate(&self, j: usize) -> Vec<f64> {
        self.iter().map(|x| x[j]).collect()
    }
}

/// Draws of a mixing index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixingDraws {
    pub values: Vec<u64>,
    pub seed: u64,
}

impl MixingDraws {
    pub fn mean(&self) -> f64 {
        self.values.iter().map(|&v| v as f64).sum::<f64>() / self.values.len() as f64
    }

    /// `counts[k] = #{i : values_i = k}` for `k ≤ max value`.
    pub fn counts(&self) -> Vec<u64> {
        let top = self.values.iter().copied().max().unwrap_or(0) as usize;
        let mut c = vec![0u64; top + 1];
        for &v in &self.values {
            c[v as usize] += 1;
        }
        c
    }
}

fn check_count(count: usize) -> Result<()> {
    if count == 0 {
        return Err(Error::domain("count must be at least 1"));
    }
    Ok(())
}

/// Fills `out` in rows of `width`, one generator stream per [`CHUNK`] rows.
fn fill<T: Send>(out: &mut [T], width: usize, seed: u64, tag: Tag, draw: impl Fn(&mut ChaCha8Rng, &mut [T]) + Sync) {
    out.par_chunks_mut(CHUNK * width).enumerate().for_each(|(c, block)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(((tag as u64) << 40) | c as u64);
        for row in block.chunks_exact_mut(width) {
            draw(&mut rng, row);
        }
    });
}

fn gamma(shape: f64) -> Result<Gamma<f64>> {
    Gamma::new(shape, 1.0).map_err(|e| Error::domain(format!("gamma shape {shape}: {e}")))
}

fn poisson<R: Rng + ?Sized>(rng: &mut R, lambda: f64) -> u64 {
    if !(lambda > 0.0) {
        return 0;
    }
    if lambda >= POISSON_SATURATION {
        return lambda.round().min(u64::MAX as f64) as u64;
    }
    match Poisson::new(lambda) {
        Ok(p) => p.sample(rng) as u64,
        Err(_) => 0,
    }
}

fn unit_vector<R: Rng + ?Sized>(rng: &mut R, out: &mut [f64]) {
    if out.len() == 1 {
        out[0] = if rng.random::<bool>() { 1.0 } else { -1.0 };
        return;
    }
    loop {
        let mut s = 0.0;
        for v in out.iter_mut() {
            *v = StandardNormal.sample(rng);
            s += *v * *v;
        }
        if s > 0.0 {
            let inv = 1.0 / s.sqrt();
            out.iter_mut().for_each(|v| *v *= inv);
            return;
        }
    }
}

/// `K`: `b ~ Gamma(ν, 1)`, then `K | b ~ NB(d/2, b/(γ² + b))`, drawn as
/// Poisson with a `Gamma(d/2, γ²/b)` rate.
fn k_draw<R: Rng + ?Sized>(rng: &mut R, g_nu: &Gamma<f64>, g_hd: &Gamma<f64>, g2: f64) -> u64 {
    if g2 == 0.0 {
        return 0;
    }
    let b = g_nu.sample(rng);
    let lambda = g_hd.sample(rng) * g2 / b;
    poisson(rng, lambda)
}

/// `N`: `t ~ Beta(μ, ν)`, then `N | t ~ NB(d/2, t(1-t))`. With
/// `t = G_μ/(G_μ + G_ν)` the odds `(1-p)/p = G_μ/G_ν + G_ν/G_μ + 1` need no
/// subtraction.
fn n_draw<R: Rng + ?Sized>(rng: &mut R, g_mu: &Gamma<f64>, g_nu: &Gamma<f64>, g_hd: &Gamma<f64>) -> u64 {
    let a = g_mu.sample(rng);
    let b = g_nu.sample(rng);
    let odds = a / b + b / a + 1.0;
    let lambda = g_hd.sample(rng) * odds;
    poisson(rng, lambda)
}

pub fn sample_k(p: &GaussStudentParams, count: usize, seed: u64) -> Result<MixingDraws> {
    check_count(count)?;
    let g_nu = gamma(p.nu())?;
    let g_hd = gamma(p.half_d())?;
    let g2 = p.gamma() * p.gamma();
    let mut values = vec![0u64; count];
    fill(&mut values, 1, seed, Tag::K, |rng, out| out[0] = k_draw(rng, &g_nu, &g_hd, g2));
    Ok(MixingDraws { values, seed })
}

pub fn sample_n(p: &StudentPairParams, count: usize, seed: u64) -> Result<MixingDraws> {
    check_count(count)?;
    let g_mu = gamma(p.mu())?;
    let g_nu = gamma(p.nu())?;
    let g_hd = gamma(p.half_d())?;
    let mut values = vec![0u64; count];
    fill(&mut values, 1, seed, Tag::N, |rng, out| out[0] = n_draw(rng, &g_mu, &g_nu, &g_hd));
    Ok(MixingDraws { values, seed })
}

fn finite_sigma(p: &GaussStudentParams) -> Result<f64> {
    let s = p.sigma();
    if !s.is_finite() {
        return Err(Error::domain("the Gaussian scale sigma must be finite"));
    }
    Ok(s)
}

/// `Z = σN₁ + sN₂/√(2a)` with `a ~ Gamma(ν, 1)` and Student scale
/// `s = γσ√2`, which is 1 unless the parameters come from
/// [`GaussStudentParams::scaled`].
pub fn sample_z(p: &GaussStudentParams, count: usize, seed: u64) -> Result<SampleBatch> {
    check_count(count)?;
    let sigma = finite_sigma(p)?;
    let scale = p.gamma() * sigma * std::f64::consts::SQRT_2;
    let d = p.d();
    let g_nu = gamma(p.nu())?;
    let mut points = vec![0.0; count * d];
    fill(&mut points, d, seed, Tag::Z, |rng, out| {
        let s = scale / (2.0 * g_nu.sample(rng)).sqrt();
        for v in out.iter_mut() {
            let n1: f64 = StandardNormal.sample(rng);
            let n2: f64 = StandardNormal.sample(rng);
            *v = sigma * n1 + s * n2;
        }
    });
    Ok(SampleBatch {
        dimension: d,
        points,
        seed,
        spec_digest: format!("z:{}", p.digest()),
    })
}

/// `Z = σ‖X_{2K+d}‖U_d` with `‖X_{2K+d}‖ = √(2 Gamma(K + d/2))`.
pub fn sample_z_radial(p: &GaussStudentParams, count: usize, seed: u64) -> Result<SampleBatch> {
    check_count(count)?;
    let sigma = finite_sigma(p)?;
    let d = p.d();
    let (g_nu, g_hd) = (gamma(p.nu())?, gamma(p.half_d())?);
    let g2 = p.gamma() * p.gamma();
    let mut points = vec![0.0; count * d];
    fill(&mut points, d, seed, Tag::ZRadial, |rng, out| {
        let k = k_draw(rng, &g_nu, &g_hd, g2);
        let chi2 = 2.0 * Gamma::new(k as f64 + p.half_d(), 1.0).map_or(0.0, |g| g.sample(rng));
        unit_vector(rng, out);
        let r = sigma * chi2.sqrt();
        out.iter_mut().for_each(|v| *v *= r);
    });
    Ok(SampleBatch {
        dimension: d,
        points,
        seed,
        spec_digest: format!("z-radial:{}", p.digest()),
    })
}

/// `Y = N₁/√(2G_ν) + N₂/√(2G_μ)`.
pub fn sample_y(p: &StudentPairParams, count: usize, seed: u64) -> Result<SampleBatch> {
    check_count(count)?;
    let d = p.d();
    let (g_nu, g_mu) = (gamma(p.nu())?, gamma(p.mu())?);
    let mut points = vec![0.0; count * d];
    fill(&mut points, d, seed, Tag::Y, |rng, out| {
        let s1 = (2.0 * g_nu.sample(rng)).sqrt().recip();
        let s2 = (2.0 * g_mu.sample(rng)).sqrt().recip();
        for v in out.iter_mut() {
            let n1: f64 = StandardNormal.sample(rng);
            let n2: f64 = StandardNormal.sample(rng);
            *v = s1 * n1 + s2 * n2;
        }
    });
    Ok(SampleBatch {
        dimension: d,
        points,
        seed,
        spec_digest: format!("y:{}", p.digest()),
    })
}

/// `Y = ‖T_{2N+d}‖U_d` with `‖T_{2N+d}‖² = Gamma(N + d/2)/Gamma(ν + μ)`.
pub fn sample_y_radial(p: &StudentPairParams, count: usize, seed: u64) -> Result<SampleBatch> {
    check_count(count)?;
    let d = p.d();
    let (g_mu, g_nu, g_hd, g_eta) = (gamma(p.mu())?, gamma(p.nu())?, gamma(p.half_d())?, gamma(p.eta())?);
    let mut points = vec![0.0; count * d];
    fill(&mut points, d, seed, Tag::YRadial, |rng, out| {
        let n = n_draw(rng, &g_mu, &g_nu, &g_hd);
        let num = Gamma::new(n as f64 + p.half_d(), 1.0).map_or(0.0, |g| g.sample(rng));
        let r = (num / g_eta.sample(rng)).sqrt();
        unit_vector(rng, out);
        out.iter_mut().for_each(|v| *v *= r);
    });
    Ok(SampleBatch {
        dimension: d,
        points,
        seed,
        spec_digest: format!("y-radial:{}", p.digest()),
    })
}

/// Uniform points on the unit sphere of `ℝ^d`.
pub fn sample_uniform_sphere(d: usize, count: usize, seed: u64) -> Result<SampleBatch> {
    check_count(count)?;
    if d == 0 {
        return Err(Error::domain("dimension d must be at least 1"));
    }
    let mut points = vec![0.0; count * d];
    fill(&mut points, d, seed, Tag::Sphere, |rng, out| unit_vector(rng, out));
    Ok(SampleBatch {
        dimension: d,
        points,
        seed,
        spec_digest: format!("sphere:d={d}"),
    })
}
