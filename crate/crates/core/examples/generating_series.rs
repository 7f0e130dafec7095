// Truncated power series: the Catalan series, the correction series and
// the cancellation that makes the unitary correction vanish.

use std::error::Error;

use wigner_moments::series::{
    catalan_identities, catalan_series, generating_series_checks, s_components, s_total,
    verify_cancellation,
};
use wigner_moments::EnsembleParams;

fn show(name: &str, coeffs: &[num_rational::BigRational]) {
    let list: Vec<String> = coeffs.iter().map(ToString::to_string).collect();
    println!("{name:<6} {}", list.join(", "));
}

pub fn run(order: usize) -> Result<(), Box<dyn Error>> {
    let t = catalan_series(order);
    show("T", t.coeffs());

    let goe = EnsembleParams::goe();
    let parts = s_components(order, &goe);
    show("S1", parts.s1.coeffs());
    show("S2", parts.s2.coeffs());
    show("S3", parts.s3.coeffs());
    show("S4", parts.s4.coeffs());
    show("S", s_total(order, &goe).coeffs());

    for check in catalan_identities(&t)
        .iter()
        .chain(&generating_series_checks(&t, &goe))
    {
        println!(
            "{:<40} {}",
            check.name,
            if check.passed() { "ok" } else { "FAILED" }
        );
    }

    let gue = s_total(order, &EnsembleParams::gue());
    println!("GUE correction series is zero: {}", gue.is_zero());
    println!(
        "cancellation holds to order {order}: {}",
        verify_cancellation(order)
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run(10)
}
