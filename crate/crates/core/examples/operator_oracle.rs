// Independent check of a Fourier transform through differential operators:
// Laplace substitution, Newton polygon, ramification, twist and residue.

use elconn::exactfield::FieldElement;
use elconn::oracle::{laplace_substitute, newton_polygon_slopes, oracle_check, Point, WeylOperator};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    // x^3 D + 2 annihilates exp(x^-2): its Laplace transform has slope 2/3 at infinity.
    let x = "x";
    let a = WeylOperator::monomial(x, FieldElement::one(), 3, 1).add(&WeylOperator::constant(x, FieldElement::from_int(2)));
    let b = laplace_substitute(&a, "y")?;
    println!("{a}  ->  {b}");
    println!("slopes at y = 0 (the point at infinity of the Fourier variable): {:?}", newton_polygon_slopes(&b, Point::Zero)?.iter().map(|(s, n)| format!("{s} x{n}")).collect::<Vec<_>>());

    let report = oracle_check(&FieldElement::from_ratio(-3, 2), 2)?;
    print!("{report}");
    assert!(report.passed());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
