// Tensor products, Hom, duals and determinants.

use elconn::connection::{ElementaryConnection, FormalConnection, RegularPart};
use elconn::exactfield::FieldElement;
use elconn::rigidity::dim_centralizer;
use elconn::series::LaurentSeries;
use elconn::structure::{determinant, dual, hom, jordan_tensor, tensor};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let r2 = RegularPart::from_pairs([(FieldElement::one(), 2)])?;
    let r3 = RegularPart::from_pairs([(FieldElement::one(), 3)])?;
    let kron = jordan_tensor(&r2, &r3);
    println!("J2 (x) J3 = {kron}");
    assert_eq!(kron.rank(), 6);

    let a = ElementaryConnection::monomial(FieldElement::one(), 2, &LaurentSeries::monomial("u", FieldElement::one(), -3), RegularPart::trivial(1))?;
    let b = ElementaryConnection::unramified(&LaurentSeries::monomial("u", FieldElement::from_int(2), -1), r2.clone())?;
    let t = tensor(&a, &b)?.canonicalize()?;
    println!("{a} (x) {b}\n  = {t}");
    assert_eq!(t.rank(), a.rank() * b.rank());

    let e = hom(&a, &a)?.canonicalize()?;
    println!("End({a}) = {e}");
    let regular: usize = e.summands.iter().filter(|s| s.q() == 0).map(|s| s.rank()).sum();
    assert_eq!(regular, a.p() * a.r() * a.r());

    println!("dual: {}", dual(&a));
    let det = determinant(&a)?;
    println!("det: {det}");
    assert_eq!(FormalConnection::single(det).rank(), 1);

    println!("dim Z(J2 + J3) = {}", dim_centralizer(&r2.direct_sum(&r3)));
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
