// Truncated Laurent series with exact coefficients and precision tracking.

use elconn::exactfield::FieldElement;
use elconn::series::LaurentSeries;

fn q(n: i64, d: i64) -> FieldElement {
    FieldElement::from_ratio(n, d)
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    // f = u + u^2 is exact; its inverse is only known to a window.
    let f = LaurentSeries::variable("u").add(&LaurentSeries::monomial("u", q(1, 1), 2));
    let inv = f.inverse(6)?;
    println!("1/(u + u^2) = {inv}");
    assert_eq!(inv.coeff(-1), q(1, 1));
    assert_eq!(inv.coeff(0), q(-1, 1));

    // Reversion: g(f(u)) = u.
    let g = f.reversion(8)?;
    let back = g.compose(&f, 8)?;
    println!("reversion of u + u^2 = {g}");
    assert_eq!(back.coeff(1), q(1, 1));
    assert!((2..8).all(|k| back.coeff(k).is_zero()));

    // (1 + u)^(1/3) cubed gives back 1 + u.
    let one_plus = LaurentSeries::constant("u", q(1, 1)).add(&LaurentSeries::variable("u"));
    let cube_root = one_plus.nth_root(3, 6)?;
    let cubed = cube_root.pow(3, 6)?;
    println!("(1 + u)^(1/3) = {cube_root}");
    assert!(cubed.agrees_with(&one_plus));

    let phi = LaurentSeries::monomial("u", q(2, 1), -3).add(&LaurentSeries::variable("u"));
    println!("principal part of {phi} is {}", phi.principal_part()?);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
