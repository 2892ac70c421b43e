// The four local Fourier transforms and their inverses.

use elconn::connection::{ElementaryConnection, FormalConnection, RegularPart};
use elconn::exactfield::FieldElement;
use elconn::fourier::{fourier_0_inf, fourier_inf_0, fourier_inf_inf, fourier_s_inf, Sign};
use elconn::series::LaurentSeries;

fn iso(a: &ElementaryConnection, b: &ElementaryConnection) -> bool {
    FormalConnection::is_isomorphic(&FormalConnection::single(a.clone()), &FormalConnection::single(b.clone())).unwrap()
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let one = FieldElement::one();
    let phi = LaurentSeries::monomial("u", one.clone(), -3).add(&LaurentSeries::monomial("u", FieldElement::from_int(2), -1));
    let reg = RegularPart::from_pairs([(FieldElement::zeta(4), 2)])?;
    let el = ElementaryConnection::monomial(one.clone(), 2, &phi, reg)?;
    println!("input        {el}  slope {}", el.invariants().slope);

    // 0 -> inf and back.
    let t = fourier_0_inf(&el, Sign::Minus)?;
    println!("F(0,inf)-    {t}  slope {}", t.invariants().slope);
    let back = fourier_inf_0(&t, Sign::Plus)?;
    assert!(iso(&back, &el));

    // inf -> inf on slope > 1, and its inverse with the opposite sign.
    let steep = ElementaryConnection::unramified(&LaurentSeries::monomial("u", one.clone(), -3), RegularPart::trivial(1))?;
    let s = fourier_inf_inf(&steep, Sign::Minus)?;
    println!("F(inf,inf)-  {steep}  ->  {s}");
    assert!(iso(&fourier_inf_inf(&s, Sign::Plus)?, &steep));

    // inf -> 0 is only defined below slope one.
    assert!(fourier_inf_0(&steep, Sign::Minus).is_err());

    // s -> inf shifts by the exponential s/u.
    let at_s = fourier_s_inf(&el, &FieldElement::from_int(3), Sign::Minus)?;
    println!("F(3,inf)-    {at_s}");
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
