// Rigidity index of local data on the projective line and its behaviour
// under the global Fourier transform.

use elconn::connection::{ElementaryConnection, RegularPart};
use elconn::exactfield::{FieldElement, Rational};
use elconn::fourier::{transformed_infinity, Sign, SingularityDatum};
use elconn::rigidity::{rigidity_breakdown, z_zhat_discrepancy};
use elconn::series::LaurentSeries;

fn res(n: i64, d: i64) -> FieldElement {
    FieldElement::exp_two_pi_i(&Rational::new(n.into(), d.into()))
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    // A generic rank-two Fuchsian system with poles at 0, 1, inf.
    let pair = |a, b| RegularPart::from_pairs([(res(a, 7), 1), (res(b, 7), 1)]);
    let data = vec![
        SingularityDatum::finite(FieldElement::zero(), pair(1, 2)?, vec![])?,
        SingularityDatum::finite(FieldElement::one(), pair(3, 0)?, vec![])?,
        SingularityDatum::infinity(vec![ElementaryConnection::regular(pair(4, 5)?)])?,
    ];
    let (rig, rows) = rigidity_breakdown(&data, 0)?;
    for c in &rows {
        println!("{:>4}: rank {}, irr(End) {}, Z {}", c.location, c.rank, c.irr_end, c.z);
    }
    println!("rigidity index = {rig}");
    assert_eq!(rig, 2);

    // Irregular data at 0 and inf, and the transformed germ at infinity.
    let el0 = ElementaryConnection::unramified(&LaurentSeries::monomial("u", FieldElement::one(), -1), RegularPart::trivial(1))?;
    let el_inf = ElementaryConnection::unramified(&LaurentSeries::monomial("u", FieldElement::one(), -2), RegularPart::trivial(1))?;
    let data = vec![
        SingularityDatum::finite(FieldElement::zero(), RegularPart::empty(), vec![el0])?,
        SingularityDatum::infinity(vec![el_inf])?,
    ];
    let hat = vec![transformed_infinity(&data, Sign::Minus)?];
    println!("transformed germ at infinity: {:?}", hat[0].all_summands()?.iter().map(|e| e.to_string()).collect::<Vec<_>>());
    let d = z_zhat_discrepancy(&data, &hat)?;
    println!("Z - Z^ discrepancy = {d}");
    assert_eq!(d, 0);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
