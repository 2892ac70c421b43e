// Exact arithmetic in cyclotomic fields with adjoined radicals.

use elconn::exactfield::FieldElement;
use elconn::exactfield::Rational;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let z3 = FieldElement::zeta(3);
    let sum = FieldElement::one() + z3.clone() + z3.pow(2)?;
    assert!(sum.is_zero());
    println!("1 + zeta3 + zeta3^2 = {sum}");

    // Mixed orders lift to a common cyclotomic field.
    let z12 = FieldElement::zeta(4) * FieldElement::zeta(3);
    println!("zeta4 * zeta3 = {z12}  (order {})", z12.order());
    assert!(z12.pow(12)?.is_one());

    let half_turn = FieldElement::exp_two_pi_i(&Rational::new(1.into(), 2.into()));
    assert_eq!(half_turn, FieldElement::from_int(-1));

    // Square root of 2 by adjoining a radical.
    let r = FieldElement::from_int(2).adjoin_root(2)?;
    assert_eq!(r.clone() * r.clone(), FieldElement::from_int(2));
    let inv = r.inverse()?;
    println!("sqrt(2) = {r}, 1/sqrt(2) = {inv}, approx {:.6}", inv.approx().re);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
