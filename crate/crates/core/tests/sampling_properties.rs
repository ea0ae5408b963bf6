use proptest::prelude::*;
use tsum::mixing::{alpha_sequence, c_sequence, n_moments, GaussStudentParams, StudentPairParams};
use tsum::oracle::{chi_square, ks_critical_1pct, ks_two_sample, TEST_LEVEL};
use tsum::sampling::{
    sample_k, sample_n, sample_uniform_sphere, sample_y, sample_y_radial, sample_z, sample_z_radial, MixingDraws,
};

fn pmf_p_value(draws: &MixingDraws, pmf: &[f64]) -> f64 {
    let n = draws.values.len() as f64;
    let len = pmf.len();
    let mut observed = vec![0u64; len + 1];
    for (k, &c) in draws.counts().iter().enumerate() {
        observed[k.min(len)] += c;
    }
    let mut expected: Vec<f64> = pmf.iter().map(|p| p * n).collect();
    expected.push((1.0 - pmf.iter().sum::<f64>()).max(0.0) * n);
    chi_square(&observed, &expected).unwrap().p_value
}

fn within_3se(hits: usize, n: usize, p: f64) -> bool {
    let n = n as f64;
    ((hits as f64 / n) - p).abs() <= 3.0 * (p * (1.0 - p) / n).sqrt()
}

#[test]
fn k_pmf_matches_alpha_sequence() {
    let p = GaussStudentParams::with_gamma(1, 2.0, 1.0).unwrap();
    let seq = alpha_sequence(&p, 1e-6).unwrap();
    let draws = sample_k(&p, 1_000_000, 5).unwrap();
    assert!(pmf_p_value(&draws, &seq.values) >= TEST_LEVEL);
}

#[test]
fn n_pmf_matches_c_sequence() {
    let p = StudentPairParams::new(2, 1.5, 2.5).unwrap();
    let seq = c_sequence(&p, 1e-6).unwrap();
    let draws = sample_n(&p, 1_000_000, 6).unwrap();
    assert!(pmf_p_value(&draws, &seq.values) >= TEST_LEVEL);
}

#[test]
fn k_zero_frequency() {
    let p = GaussStudentParams::with_gamma(2, 2.0, 1.0).unwrap();
    let draws = sample_k(&p, 1_000_000, 8).unwrap();
    let zeros = draws.values.iter().filter(|&&k| k == 0).count();
    assert!(within_3se(zeros, draws.values.len(), 0.596_347_362_323_194_1));
}

#[test]
fn tiny_gamma_gives_zero_index() {
    let p = GaussStudentParams::with_gamma(1, 2.0, 1e-8).unwrap();
    assert!(sample_k(&p, 100_000, 3).unwrap().values.iter().all(|&k| k == 0));
}

#[test]
fn n_mean_for_equal_halves() {
    let p = StudentPairParams::new(1, 2.0, 2.0).unwrap();
    let m = n_moments(&p).unwrap();
    assert!((m.mean - 2.5).abs() < 1e-12);
    let draws = sample_n(&p, 1_000_000, 9).unwrap();
    let n = draws.values.len() as f64;
    let mean = draws.mean();
    let var = draws.values.iter().map(|&v| (v as f64 - mean).powi(2)).sum::<f64>() / (n - 1.0);
    assert!((mean - 2.5).abs() <= 3.0 * (var / n).sqrt());
}

#[test]
fn dual_representations_agree() {
    const N: usize = 100_000;
    let crit = ks_critical_1pct(N, Some(N));
    let z = GaussStudentParams::with_gamma(2, 1.5, 0.8).unwrap();
    let d = ks_two_sample(&sample_z(&z, N, 31).unwrap().norms(), &sample_z_radial(&z, N, 32).unwrap().norms());
    assert!(d <= crit, "Z: {d} > {crit}");
    let y = StudentPairParams::new(3, 1.0, 2.5).unwrap();
    let d = ks_two_sample(&sample_y(&y, N, 33).unwrap().norms(), &sample_y_radial(&y, N, 34).unwrap().norms());
    assert!(d <= crit, "Y: {d} > {crit}");
}

#[test]
fn sphere_is_isotropic_in_the_plane() {
    const N: usize = 200_000;
    const BINS: usize = 16;
    let s = sample_uniform_sphere(2, N, 12).unwrap();
    let mut observed = vec![0u64; BINS];
    for x in s.iter() {
        let a = x[1].atan2(x[0]) + std::f64::consts::PI;
        observed[((a / std::f64::consts::TAU * BINS as f64) as usize).min(BINS - 1)] += 1;
    }
    let expected = vec![N as f64 / BINS as f64; BINS];
    assert!(chi_square(&observed, &expected).unwrap().p_value >= TEST_LEVEL);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn batches_are_reproducible(seed in any::<u64>(), d in 1usize..4, nu in 0.5f64..5.0, g in 0.1f64..3.0) {
        let p = GaussStudentParams::with_gamma(d, nu, g).unwrap();
        let a = sample_z(&p, 3000, seed).unwrap();
        let b = sample_z(&p, 3000, seed).unwrap();
        prop_assert_eq!(&a.points, &b.points);
        let short = sample_z(&p, 1000, seed).unwrap();
        prop_assert_eq!(&short.points[..], &a.points[..1000 * d]);
        let q = StudentPairParams::new(d, nu, g + 0.5).unwrap();
        prop_assert_eq!(sample_n(&q, 500, seed).unwrap().values, sample_n(&q, 500, seed).unwrap().values);
    }

    #[test]
    fn sphere_points_are_unit(seed in any::<u64>(), d in 1usize..6) {
        let s = sample_uniform_sphere(d, 200, seed).unwrap();
        for x in s.iter() {
            let n: f64 = x.iter().map(|v| v * v).sum();
            prop_assert!((n - 1.0).abs() < 1e-12);
        }
    }
}
