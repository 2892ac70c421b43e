// Canonical presentations and isomorphism tests for elementary connections.

use elconn::connection::{ElementaryConnection, FormalConnection, RegularPart};
use elconn::exactfield::FieldElement;
use elconn::series::LaurentSeries;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let triv = RegularPart::trivial(1);

    // El(u -> 2u, u^-1) is El(u -> u, 2u^-1).
    let a = ElementaryConnection::monomial(FieldElement::from_int(2), 1, &LaurentSeries::monomial("u", FieldElement::one(), -1), triv.clone())?;
    let canon = FormalConnection::single(a.clone()).canonicalize()?;
    println!("{a}  ->  {canon}");

    // Rotating u by a cube root of unity gives an isomorphic presentation.
    let phi = LaurentSeries::monomial("u", FieldElement::one(), -2).add(&LaurentSeries::monomial("u", FieldElement::from_int(5), -1));
    let b = ElementaryConnection::monomial(FieldElement::one(), 3, &phi, triv.clone())?;
    for k in 0..3 {
        let rotated = b.rotate(&FieldElement::zeta_pow(3, k))?;
        let w = ElementaryConnection::is_isomorphic_elementary(&b, &rotated)?;
        println!("rotation by zeta3^{k}: {rotated}  witness {:?}", w.as_ref().map(|w| w.to_string()));
        assert!(w.is_some());
    }

    // Changing a coefficient breaks the isomorphism.
    let phi2 = phi.add(&LaurentSeries::monomial("u", FieldElement::one(), -1));
    let c = ElementaryConnection::monomial(FieldElement::one(), 3, &phi2, triv.clone())?;
    assert!(ElementaryConnection::is_isomorphic_elementary(&b, &c)?.is_none());

    // A non-minimal presentation: phi = u^-2 only depends on u^2.
    let d = ElementaryConnection::monomial(FieldElement::one(), 2, &LaurentSeries::monomial("u", FieldElement::one(), -2), triv)?;
    let m = d.reduce_minimal()?;
    println!("{d} is minimal: {}; reduced to {m}", d.is_minimal());

    let twice = canon.canonicalize()?;
    assert_eq!(twice.to_string(), canon.to_string());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
