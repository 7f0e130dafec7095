// The correction measure: density, atoms, moments by quadrature and the
// Stieltjes transform against its moment series.

use std::error::Error;

use num_complex::Complex64;
use num_traits::ToPrimitive;
use wigner_moments::combinatorics::nu_moment;
use wigner_moments::measure::{
    semicircle_density, semicircle_stieltjes, stieltjes_from_even_moments,
};
use wigner_moments::{EnsembleParams, SignedMeasureNu};

pub fn run() -> Result<(), Box<dyn Error>> {
    let params = EnsembleParams::goe();
    let nu = SignedMeasureNu::new(&params);

    println!("{:>6} {:>12} {:>12}", "x", "semicircle", "nu density");
    for i in 0..=8 {
        let x = -1.8 + 0.45 * i as f64;
        println!(
            "{x:>6.2} {:>12.6} {:>12.6}",
            semicircle_density(x),
            nu.density(x)?
        );
    }
    for (x, mass) in nu.atoms() {
        println!("atom at {x:+} with mass {mass}");
    }

    for k in [2, 4, 6, 8] {
        println!(
            "moment {k}: quadrature {:.10}, exact {}",
            nu.quadrature_moment(k, 400),
            nu_moment(k, &params)
        );
    }

    let moments: Vec<f64> = (0..=30)
        .map(|l| nu_moment(2 * l, &params).to_f64().unwrap_or(f64::NAN))
        .collect();
    for z in [
        Complex64::new(4.0, 0.0),
        Complex64::new(0.5, 3.5),
        Complex64::new(-3.0, -2.0),
    ] {
        let closed = nu.stieltjes(z)?;
        let series = stieltjes_from_even_moments(z, &moments);
        println!(
            "z = {z}: H = {:.6}, transform = {:.10}, series error {:.1e}",
            semicircle_stieltjes(z)?,
            closed,
            (closed - series).norm()
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run()
}
