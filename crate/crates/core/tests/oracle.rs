mod common;

use common::{brute_force_moment, Gaussian};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use wigner_moments::combinatorics::{family_counts, nu_moment, semicircle_moment};
use wigner_moments::oracle::{
    class_census, count_classes, enumerate_canonical_words, exact_moment, CycleType, MomentModel,
};
use wigner_moments::EnsembleParams;

fn q(p: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(d))
}

#[test]
fn canonical_enumeration_agrees_with_all_index_tuples() {
    for (law, model) in [
        (Gaussian::Orthogonal, MomentModel::goe(6)),
        (Gaussian::Unitary, MomentModel::gue(6)),
    ] {
        for k in [2usize, 4, 6] {
            for n in 1..=5usize {
                if n.pow(k as u32) > 20_000 {
                    continue;
                }
                assert_eq!(
                    exact_moment(k, n as u64, &model).unwrap(),
                    brute_force_moment(k, n, law),
                    "k = {k}, n = {n}"
                );
            }
        }
    }
}

#[test]
fn fourth_moments_in_closed_form() {
    // n³ m₄(n) is a cubic in n, so four values of n pin it down.
    for n in 1..=4i64 {
        let nn = q(n, 1);
        assert_eq!(
            brute_force_moment(4, n as usize, Gaussian::Unitary),
            q(2, 1) + q(1, 1) / (&nn * &nn)
        );
        assert_eq!(
            brute_force_moment(4, n as usize, Gaussian::Orthogonal),
            q(2, 1) + q(5, 1) / &nn + q(5, 1) / (&nn * &nn)
        );
        assert_eq!(
            brute_force_moment(2, n as usize, Gaussian::Orthogonal),
            q(1, 1) + q(1, n)
        );
        assert_eq!(
            brute_force_moment(2, n as usize, Gaussian::Unitary),
            q(1, 1)
        );
    }
}

#[test]
fn second_moment_for_every_preset() {
    let models = [
        MomentModel::goe(2),
        MomentModel::gue(2),
        MomentModel::rademacher(q(1, 1), q(1, 1), 2).unwrap(),
        MomentModel::rademacher(q(2, 3), q(5, 1), 2).unwrap(),
        MomentModel::three_point(
            &EnsembleParams::new(0, q(3, 1), q(1, 2), q(10, 1)).unwrap(),
            2,
        )
        .unwrap(),
    ];
    for model in &models {
        let p = model.params().unwrap();
        for n in [1u64, 7, 100] {
            let expect = q(1, 1) + (p.s2() / p.sigma2() - q(1, 1)) / q(n as i64, 1);
            assert_eq!(exact_moment(2, n, model).unwrap(), expect);
        }
    }
}

#[test]
fn family_counts_match_enumeration() {
    for l in 1..=4 {
        let census = class_census(2 * l).unwrap();
        let f = family_counts(l);
        let got = |v, e, t| BigInt::from(census.count(v, e, t));
        assert_eq!(got(l + 1, l, None), f.trees, "l = {l}");
        assert_eq!(got(l, l - 1, None), f.fourfold_edge, "l = {l}");
        assert_eq!(got(l, l, Some(CycleType::SelfLoop)), f.self_loop, "l = {l}");
        assert_eq!(
            got(l, l, Some(CycleType::CycleOneWay)),
            f.cycle_one_way,
            "l = {l}"
        );
        assert_eq!(
            got(l, l, Some(CycleType::CycleBothWays)),
            f.cycle_both_ways,
            "l = {l}"
        );
    }
}

#[test]
fn counts_partition_the_enumeration() {
    for k in 1..=8 {
        let census = class_census(k).unwrap();
        let mut sum = BigInt::zero();
        for v in 1..=k {
            for e in 1..=k {
                sum += count_classes(k, v, e, None).unwrap();
            }
        }
        assert_eq!(sum, BigInt::from(census.total()));
        assert_eq!(
            census.total() as usize,
            enumerate_canonical_words(k).count()
        );
    }
}

#[test]
fn spec_listing_examples() {
    assert_eq!(class_census(4).unwrap().total(), 15);
    assert_eq!(count_classes(4, 3, 2, None).unwrap(), BigInt::from(2));
    let one_way: Vec<String> = enumerate_canonical_words(6)
        .filter(|c| c.v() == 3 && c.e() == 3 && c.cycle_type() == CycleType::CycleOneWay)
        .map(|c| c.word_string())
        .collect();
    assert_eq!(one_way, vec!["123123"]);
}

#[test]
fn residual_shrinks_like_one_over_n() {
    let models = [
        MomentModel::goe(8),
        MomentModel::gue(8),
        MomentModel::rademacher(q(1, 1), q(1, 1), 8).unwrap(),
        MomentModel::three_point(
            &EnsembleParams::new(1, q(1, 2), q(2, 1), q(1, 1)).unwrap(),
            8,
        )
        .unwrap(),
    ];
    for model in &models {
        let p = model.params().unwrap();
        for k in [2usize, 4, 6, 8] {
            let poly = wigner_moments::oracle::moment_polynomial(k, model).unwrap();
            let sc = BigRational::from_integer(semicircle_moment(k));
            let nu = nu_moment(k, &p);
            let residual = |n: u64| ((poly.eval(n) - &sc) * q(n as i64, 1) - &nu).abs();
            let r: Vec<BigRational> = [100u64, 1000, 10_000].map(residual).to_vec();
            for w in r.windows(2) {
                if !w[0].is_zero() {
                    assert!(&w[1] * q(8, 1) <= w[0], "k = {k}, {p}: {r:?}");
                } else {
                    assert!(w[1].is_zero());
                }
            }
        }
    }
}
