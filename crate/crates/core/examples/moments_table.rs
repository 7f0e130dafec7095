// Semicircle moments, the order-one correction and its four parts.
//
// `cargo run --example moments_table -- gue 100`

use std::error::Error;

use num_traits::ToPrimitive;
use wigner_moments::combinatorics::{
    expected_moment_expansion, order_one_coeff, semicircle_moment,
};
use wigner_moments::EnsembleParams;

pub fn run(preset: &str, n: u64) -> Result<(), Box<dyn Error>> {
    let params = match preset {
        "goe" => EnsembleParams::goe(),
        "gue" => EnsembleParams::gue(),
        "rademacher" => EnsembleParams::rademacher(),
        other => return Err(format!("unknown preset {other}").into()),
    };
    println!("{preset}: {params}");
    println!(
        "{:>3} {:>6} {:>8} {:>8} {:>8} {:>8} {:>8} {:>14}",
        "k", "sc", "c1", "c2", "c3", "c4", "nu", "m_k(n) approx"
    );
    for l in 0..=6 {
        let k = 2 * l;
        let t = order_one_coeff(l, &params);
        let approx = expected_moment_expansion(k, n, &params);
        println!(
            "{k:>3} {:>6} {:>8} {:>8} {:>8} {:>8} {:>8} {:>14.8}",
            semicircle_moment(k),
            t.c1,
            t.c2,
            t.c3,
            t.c4,
            t.total,
            approx.to_f64().unwrap_or(f64::NAN)
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    let mut args = std::env::args().skip(1);
    let preset = args.next().unwrap_or_else(|| "goe".into());
    let n = args.next().map(|s| s.parse()).transpose()?.unwrap_or(100);
    run(&preset, n)
}
