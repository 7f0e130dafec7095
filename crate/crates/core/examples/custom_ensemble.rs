// An ensemble given only by its parameters: entries drawn from a
// three-point law matching them, checked against the exact enumeration.

use std::error::Error;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use wigner_moments::combinatorics::{nu_moment, semicircle_moment};
use wigner_moments::montecarlo::{estimate_correction, mean_and_stderr};
use wigner_moments::oracle::{exact_moment, MomentModel};
use wigner_moments::{EnsembleParams, EnsembleSampler};

fn q(p: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(d))
}

pub fn run(samples: usize) -> Result<(), Box<dyn Error>> {
    // real entries, variance 1/2, heavy fourth moment, diagonal variance 2
    let params = EnsembleParams::new(1, q(1, 2), q(2, 1), q(3, 4))?;
    println!("{params}");

    let sampler = EnsembleSampler::custom(&params);
    let mut rng = wigner_moments::montecarlo::sample_rng(5, 0, 0);
    let draws: Vec<(f64, f64)> = (0..100_000)
        .map(|_| sampler.draw_offdiag(&mut rng))
        .collect();
    let (m2, se2) = mean_and_stderr(draws.iter().map(|(a, b)| a * a + b * b));
    let (m4, se4) = mean_and_stderr(draws.iter().map(|(a, b)| (a * a + b * b).powi(2)));
    println!("E|W|^2 = {m2:.4} ± {se2:.4}, E|W|^4 = {m4:.4} ± {se4:.4}");

    let model = MomentModel::three_point(&params, 6)?;
    for k in [2usize, 4, 6] {
        let nu = nu_moment(k, &params);
        let m = exact_moment(k, 20, &model)?;
        let exact = (m - BigRational::from_integer(semicircle_moment(k))) * q(20, 1);
        let est = estimate_correction(k, 20, samples, &sampler, 9)?;
        println!(
            "k = {k}: nu = {nu}; at n = 20 exact n(m_k - sc_k) = {:.3}, sampled {:.3} ± {:.3}",
            exact.to_f64().unwrap_or(f64::NAN),
            est.point,
            est.stderr
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run(2000)
}
