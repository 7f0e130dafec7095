// Sampled matrices against the exact correction, directly and with
// Richardson extrapolation over n and 2n.
//
// `cargo run --release --example monte_carlo -- 64 20000`

use std::error::Error;

use num_rational::BigRational;
use num_traits::ToPrimitive;
use wigner_moments::combinatorics::semicircle_moment;
use wigner_moments::montecarlo::{estimate_corrections, RichardsonEstimate};
use wigner_moments::oracle::exact_moment;
use wigner_moments::EnsembleSampler;

pub fn run(n: usize, samples: usize, seed: u64) -> Result<(), Box<dyn Error>> {
    let ks = [2, 4, 6];
    for (name, sampler) in [
        ("GOE", EnsembleSampler::goe()),
        ("GUE", EnsembleSampler::gue()),
    ] {
        let model = sampler.moment_model(6)?;
        let coarse = estimate_corrections(&ks, n, samples, &sampler, seed)?;
        let fine = estimate_corrections(&ks, 2 * n, samples, &sampler, seed)?;
        for (c, f) in coarse.iter().zip(&fine) {
            let m = exact_moment(f.k, f.n as u64, &model)?;
            let target = ((m - BigRational::from_integer(semicircle_moment(f.k)))
                * BigRational::from_integer(f.n.into()))
            .to_f64()
            .unwrap_or(f64::NAN);
            let rich = RichardsonEstimate::from_pair(c, f);
            println!(
                "{name} k = {}: n = {} gives {:.4} ± {:.4} (exact {:.4}); Richardson {:.4} ± {:.4} (limit {})",
                f.k,
                f.n,
                f.point,
                f.stderr,
                target,
                rich.point,
                rich.stderr,
                rich.reference
            );
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    let mut args = std::env::args().skip(1);
    let n = args.next().map(|s| s.parse()).transpose()?.unwrap_or(32);
    let samples = args.next().map(|s| s.parse()).transpose()?.unwrap_or(2000);
    run(n, samples, 1)
}
