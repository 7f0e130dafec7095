// Closed walks up to relabelling: listing, classification, family counts
// and the exact finite-n moments they produce.

use std::error::Error;

use num_rational::BigRational;
use num_traits::ToPrimitive;
use wigner_moments::combinatorics::{family_counts, nu_moment, semicircle_moment};
use wigner_moments::oracle::{
    class_census, classify_walk, enumerate_canonical_words, exact_moment, moment_polynomial,
    parse_word,
};
use wigner_moments::{CycleType, MomentModel};

pub fn run() -> Result<(), Box<dyn Error>> {
    let walk = classify_walk(&parse_word("123123")?)?;
    println!(
        "123123: v = {}, e = {}, {}",
        walk.v(),
        walk.e(),
        walk.cycle_type().as_str()
    );

    println!("classes of length 6 with v = e = 3:");
    for class in enumerate_canonical_words(6).filter(|c| c.v() == 3 && c.e() == 3) {
        println!("  {} {}", class.word_string(), class.cycle_type().as_str());
    }

    for l in 1..=4 {
        let census = class_census(2 * l)?;
        let f = family_counts(l);
        println!(
            "l = {l}: {} classes; trees {} (formula {}), self-loop {} (formula {}), one-way {} (formula {})",
            census.total(),
            census.count(l + 1, l, None),
            f.trees,
            census.count(l, l, Some(CycleType::SelfLoop)),
            f.self_loop,
            census.count(l, l, Some(CycleType::CycleOneWay)),
            f.cycle_one_way,
        );
    }

    let model = MomentModel::goe(8);
    let params = model.params()?;
    for k in [4usize, 6, 8] {
        let poly = moment_polynomial(k, &model)?;
        let sc = BigRational::from_integer(semicircle_moment(k));
        for n in [10u64, 100, 1000] {
            let m = exact_moment(k, n, &model)?;
            debug_assert_eq!(m, poly.eval(n));
            let scaled = (m - &sc) * BigRational::from_integer(n.into());
            println!(
                "GOE k = {k}, n = {n:>4}: n(m_k - sc_k) = {:.6} -> {}",
                scaled.to_f64().unwrap_or(f64::NAN),
                nu_moment(k, &params)
            );
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run()
}
