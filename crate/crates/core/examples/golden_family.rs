// Local Fourier transform F^(0,inf) of the exponential family El(u, a u^-q, 1).
//
// Run with `cargo run --example golden_family`.

use elconn::connection::{ElementaryConnection, FormalConnection, RegularPart};
use elconn::exactfield::FieldElement;
use elconn::fourier::{fourier_0_inf, Sign};
use elconn::series::LaurentSeries;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let values = [
        FieldElement::from_int(1),
        FieldElement::from_int(2),
        FieldElement::from_ratio(-3, 2),
        FieldElement::zeta(3),
    ];
    for a in &values {
        for q in 1..=5i64 {
            let phi = LaurentSeries::monomial("u", a.clone(), -q);
            let el = ElementaryConnection::unramified(&phi, RegularPart::trivial(1))?;
            let t = fourier_0_inf(&el, Sign::Minus)?;
            let t = FormalConnection::single(t).canonicalize()?;

            // expected: El(-u^{q+1}/(q a), (q+1) a u^-q, [((-1)^q : 1)])
            let qa = a.clone() * FieldElement::from_int(q);
            let rho = LaurentSeries::monomial("u", -qa.inverse()?, q + 1);
            let sign = if q % 2 == 0 { 1 } else { -1 };
            let expected = ElementaryConnection::monomial(
                -qa.inverse()?,
                (q + 1) as usize,
                &LaurentSeries::monomial("u", a.clone() * FieldElement::from_int(q + 1), -q),
                RegularPart::from_pairs([(FieldElement::from_int(sign), 1)])?,
            )?;
            assert!(t.summands[0].rho().series().same_as(&rho));
            assert!(t.summands[0].same_presentation(&expected), "{t} vs {expected}");
            println!("a = {a}, q = {q}:  {t}");
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
