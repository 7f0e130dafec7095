use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wigner_moments::combinatorics::semicircle_moment;
use wigner_moments::montecarlo::{
    empirical_moments, estimate_correction, mean_and_stderr, richardson_correction, sample_matrix,
    sample_moments, sample_rng, EnsembleSampler,
};
use wigner_moments::oracle::exact_moment;
use wigner_moments::EnsembleParams;

fn int_ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// `n (m_k(n) - sc_k)` from the exact enumeration.
fn oracle_correction(k: usize, n: u64, sampler: &EnsembleSampler) -> f64 {
    let model = sampler.moment_model(k).unwrap();
    let m = exact_moment(k, n, &model).unwrap().to_f64().unwrap();
    n as f64 * (m - semicircle_moment(k).to_f64().unwrap())
}

#[test]
fn gue_fourth_moment_at_n64() {
    let gue = EnsembleSampler::gue();
    let est = estimate_correction(4, 64, 20_000, &gue, 11).unwrap();
    let target = oracle_correction(4, 64, &gue);
    assert_eq!(target, 1.0 / 64.0);
    assert!(est.z_against(target).abs() <= 4.0, "{est:?}");
    assert_eq!(est.reference, 0.0);
}

#[test]
fn goe_fourth_moment_and_richardson() {
    let goe = EnsembleSampler::goe();
    let target = oracle_correction(4, 128, &goe);
    assert_eq!(target, 5.0 + 5.0 / 128.0);
    let rich = richardson_correction(4, 64, &goe, 20_000, 12).unwrap();
    let fine = estimate_correction(4, 128, 20_000, &goe, 12).unwrap();
    assert!(fine.z_against(target).abs() <= 4.0, "{fine:?}");
    assert_eq!(rich.reference, 5.0);
    assert!(rich.z_score().abs() <= 4.0, "{rich:?}");
}

#[test]
fn rademacher_second_moment_has_no_correction() {
    let rad = EnsembleSampler::rademacher(int_ratio(1, 1), int_ratio(1, 1)).unwrap();
    for n in [16, 48] {
        let est = estimate_correction(2, n, 4000, &rad, 3).unwrap();
        assert_eq!(est.reference, 0.0);
        // unit signs make tr(X²)/n exactly 1, so the band has zero width
        assert!(est.point.abs() <= 4.0 * est.stderr + 1e-12, "{est:?}");
    }
}

#[test]
fn gue_richardson_is_centred_for_k_up_to_8() {
    let gue = EnsembleSampler::gue();
    for k in [2, 4, 6, 8] {
        let rich = richardson_correction(k, 16, &gue, 4000, 5).unwrap();
        assert!(rich.z_score().abs() <= 4.0, "k = {k}: {rich:?}");
    }
}

#[test]
fn replay_is_bit_identical() {
    let goe = EnsembleSampler::goe();
    let a = richardson_correction(4, 12, &goe, 300, 99).unwrap();
    let b = richardson_correction(4, 12, &goe, 300, 99).unwrap();
    assert_eq!(a.point.to_bits(), b.point.to_bits());
    assert_eq!(a.stderr.to_bits(), b.stderr.to_bits());
    let c = richardson_correction(4, 12, &goe, 300, 100).unwrap();
    assert_ne!(a.point, c.point);
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let gue = EnsembleSampler::gue();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(3)
        .build()
        .unwrap();
    let threaded = pool.install(|| sample_moments(10, 200, &gue, 7, 4).unwrap());
    let serial: Vec<Vec<f64>> = (0..200)
        .map(|i| {
            let x =
                wigner_moments::montecarlo::sample_matrix_with(10, &gue, &mut sample_rng(7, 10, i));
            empirical_moments(&x, 4)
        })
        .collect();
    assert_eq!(threaded.values, serial);
}

#[test]
fn sampled_matrices_are_hermitian() {
    for sampler in [
        EnsembleSampler::goe(),
        EnsembleSampler::gue(),
        EnsembleSampler::custom(&EnsembleParams::from_integers(0, 2, 3, 9).unwrap()),
    ] {
        let x = sample_matrix(9, &sampler, 4);
        assert!(x.is_hermitian());
        assert_eq!(x.is_real(), sampler.is_real());
    }
}

#[test]
fn offdiagonal_second_moment_of_x_is_one_over_n() {
    let n = 20;
    let goe = EnsembleSampler::goe();
    let values: Vec<f64> = (0..2000u64)
        .flat_map(|s| {
            let x = sample_matrix(n, &goe, s);
            (0..n)
                .flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
                .map(|(i, j)| x.entry(i, j).norm_sqr())
                .collect::<Vec<_>>()
        })
        .collect();
    let (mean, se) = mean_and_stderr(values);
    assert!((mean - 1.0 / n as f64).abs() <= 3.0 * se, "{mean} ± {se}");
}

/// Empirical `E|W|²`, `E|W|⁴`, `E[W²]` and diagonal variance against the
/// parameters, within 5 standard errors over 10⁶ draws.
fn check_entry_moments(sampler: &EnsembleSampler) {
    let draws = 1_000_000;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let w: Vec<(f64, f64)> = (0..draws).map(|_| sampler.draw_offdiag(&mut rng)).collect();
    let d: Vec<f64> = (0..draws).map(|_| sampler.draw_diag(&mut rng)).collect();
    let p = sampler.params();
    let f = |v: &BigRational| v.to_f64().unwrap();
    let within = |(mean, se): (f64, f64), target: f64, what: &str| {
        assert!(
            (mean - target).abs() <= 5.0 * se.max(1e-12),
            "{what}: {mean} ± {se} vs {target} for {:?}",
            sampler.preset()
        );
    };
    within(mean_and_stderr(w.iter().map(|(a, _)| *a)), 0.0, "mean re");
    within(mean_and_stderr(w.iter().map(|(_, b)| *b)), 0.0, "mean im");
    within(
        mean_and_stderr(w.iter().map(|(a, b)| a * a + b * b)),
        f(p.sigma2()),
        "sigma2",
    );
    within(
        mean_and_stderr(w.iter().map(|(a, b)| (a * a + b * b).powi(2))),
        f(p.alpha()),
        "alpha",
    );
    // E[W²] is σ² for real entries and 0 for complex ones
    let real_sq = if p.is_real() { f(p.sigma2()) } else { 0.0 };
    within(
        mean_and_stderr(w.iter().map(|(a, b)| a * a - b * b)),
        real_sq,
        "Re E[W^2]",
    );
    within(mean_and_stderr(d.iter().copied()), 0.0, "diag mean");
    within(mean_and_stderr(d.iter().map(|x| x * x)), f(p.s2()), "s2");
}

#[test]
fn entry_moments_match_parameters() {
    check_entry_moments(&EnsembleSampler::goe());
    check_entry_moments(&EnsembleSampler::gue());
    check_entry_moments(&EnsembleSampler::rademacher(int_ratio(1, 1), int_ratio(1, 1)).unwrap());
    check_entry_moments(&EnsembleSampler::rademacher(int_ratio(1, 2), int_ratio(3, 1)).unwrap());
    check_entry_moments(&EnsembleSampler::custom(
        &EnsembleParams::from_integers(1, 1, 1, 4).unwrap(),
    ));
    check_entry_moments(&EnsembleSampler::custom(
        &EnsembleParams::new(0, int_ratio(2, 1), int_ratio(1, 2), int_ratio(5, 1)).unwrap(),
    ));
}

#[test]
fn odd_moments_vanish_in_mean() {
    for sampler in [EnsembleSampler::goe(), EnsembleSampler::gue()] {
        for n in [32, 64, 128] {
            let data = sample_moments(n, 600, &sampler, 8, 5).unwrap();
            let scale = (n as f64).powf(1.5);
            for k in [1, 3, 5] {
                let (mean, se) = data.statistic(|m| scale * m[k - 1]);
                assert!(
                    mean.abs() <= 4.0 * se,
                    "{:?} n = {n} k = {k}: {mean} ± {se}",
                    sampler.preset()
                );
            }
        }
    }
}
