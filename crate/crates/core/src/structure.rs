//! Dual, tensor product, Hom, determinant and the regular part of End.

use num_integer::Integer;

use crate::connection::{
    ConnectionError, ElementaryConnection, FormalConnection, JordanBlock, RegularPart, Result, VAR,
};
use crate::exactfield::FieldElement;
use crate::series::{LaurentSeries, Precision};

/// `El(rho, phi, R)^* = El(rho, -phi, R^*)`.
pub fn dual(el: &ElementaryConnection) -> ElementaryConnection {
    ElementaryConnection::new(el.rho().clone(), &el.phi().series().neg(), el.reg().dual())
        .expect("negating a principal part keeps it principal")
}

/// Jordan form of a Kronecker product:
/// `J_a(l) (x) J_b(m) = sum_{k=1}^{min(a,b)} J_{a+b+1-2k}(l m)`.
pub fn jordan_tensor(a: &RegularPart, b: &RegularPart) -> RegularPart {
    let mut blocks = Vec::new();
    for x in a.blocks() {
        for y in b.blocks() {
            let e = (&x.eigenvalue * &y.eigenvalue).simplify();
            for k in 1..=x.size.min(y.size) {
                blocks.push(JordanBlock::new(e.clone(), x.size + y.size + 1 - 2 * k));
            }
        }
    }
    RegularPart::new(blocks).expect("products of nonzero eigenvalues are nonzero")
}

/// Tensor product of two elementary connections, canonicalized.
///
/// With `d = gcd(p1, p2)` and `p_i = d p_i'`, the summands are
/// `El(C w^{p1 p2/d}, phi1(a1 w^{p2'}) + phi2(a2 zeta_{p2}^k w^{p1'}), R)` for `k < d`,
/// where `c1 a1^{p1} = c2 a2^{p2} = C` and
/// `R = pullback(R1, p2') (x) pullback(R2, p1')`.
pub fn tensor(a: &ElementaryConnection, b: &ElementaryConnection) -> Result<FormalConnection> {
    let mut provenance = Vec::new();
    let parts = tensor_parts(a, b, &mut provenance)?;
    let reg = jordan_tensor(&parts.a.reg().pullback(parts.q2), &parts.b.reg().pullback(parts.q1));
    let mut summands = Vec::with_capacity(parts.phis.len());
    for phi in &parts.phis {
        let phi = phi.map_coeffs(FieldElement::simplify);
        summands.push(ElementaryConnection::monomial(parts.big_c.clone(), parts.p, &phi, reg.clone())?);
    }
    let mut m = FormalConnection::new(summands);
    m.provenance = provenance;
    m.canonicalize()
}

/// `irr Hom(a, b)`, read off the pole orders of the tensor exponents without
/// assembling the product.
pub fn hom_irregularity(a: &ElementaryConnection, b: &ElementaryConnection) -> Result<usize> {
    let parts = tensor_parts(&dual(a), b, &mut Vec::new())?;
    let poles: usize = parts.phis.iter().map(|phi| phi.valuation().map_or(0, |v| (-v).max(0) as usize)).sum();
    Ok(poles * a.r() * b.r())
}

/// `irr End(m)` summed over pairs of summands.
pub fn end_irregularity(m: &FormalConnection) -> Result<usize> {
    let mut total = 0;
    for x in &m.summands {
        for y in &m.summands {
            total += hom_irregularity(x, y)?;
        }
    }
    Ok(total)
}

struct TensorParts {
    a: ElementaryConnection,
    b: ElementaryConnection,
    q1: usize,
    q2: usize,
    p: usize,
    big_c: FieldElement,
    phis: Vec<LaurentSeries>,
}

fn tensor_parts(a: &ElementaryConnection, b: &ElementaryConnection, provenance: &mut Vec<String>) -> Result<TensorParts> {
    let a = normalized(a, provenance)?;
    let b = normalized(b, provenance)?;
    let (p1, p2) = (a.p(), b.p());
    let d = p1.gcd(&p2);
    let (q1, q2) = (p1 / d, p2 / d);
    let (c1, c2) = (a.rho().leading_coefficient(), b.rho().leading_coefficient());

    // a1^{p1} / a2^{p2} = c2 / c1
    let ratio = c2.checked_div(&c1)?;
    let (alpha1, alpha2) = if ratio.is_one() {
        (FieldElement::one(), FieldElement::one())
    } else {
        let s = ratio.adjoin_root(d)?;
        let e = (q1 as i64).extended_gcd(&(q2 as i64));
        // e.x q1 + e.y q2 = 1, so s^{e.x q1 + e.y q2} = s
        (s.pow(e.x)?, s.pow(-e.y)?)
    };
    let big_c = c1.checked_mul(&alpha1.pow(p1 as i64)?)?.simplify();

    let mut phis = Vec::with_capacity(d);
    for k in 0..d {
        let sub1 = LaurentSeries::monomial(VAR, alpha1.clone(), q2 as i64);
        let rot = alpha2.checked_mul(&FieldElement::zeta_pow(p2 as u64, k as i64))?;
        let sub2 = LaurentSeries::monomial(VAR, rot, q1 as i64);
        phis.push(a.phi().series().compose(&sub1, 1)?.add(&b.phi().series().compose(&sub2, 1)?));
    }
    Ok(TensorParts { a, b, q1, q2, p: p1 * p2 / d, big_c, phis })
}

fn normalized(el: &ElementaryConnection, log: &mut Vec<String>) -> Result<ElementaryConnection> {
    if el.is_normalized() {
        return Ok(el.clone());
    }
    let n = el.normalize_ramification()?;
    log.push(format!("reparametrized rho = {} to {}", el.rho().series(), n.rho().series()));
    Ok(n)
}

/// `Hom(a, b) = a^* (x) b`.
pub fn hom(a: &ElementaryConnection, b: &ElementaryConnection) -> Result<FormalConnection> {
    tensor(&dual(a), b)
}

/// Tensor product of direct sums, distributing over summands.
pub fn tensor_sum(a: &FormalConnection, b: &FormalConnection) -> Result<FormalConnection> {
    let mut out = FormalConnection::default();
    for x in &a.summands {
        for y in &b.summands {
            out = out.direct_sum(&tensor(x, y)?);
        }
    }
    out.canonicalize()
}

/// `Hom` of direct sums.
pub fn hom_sum(a: &FormalConnection, b: &FormalConnection) -> Result<FormalConnection> {
    let dual_a = FormalConnection::new(a.summands.iter().map(dual).collect());
    tensor_sum(&dual_a, b)
}

/// Regular part of `End(m)`: one entry `rho_{i,+} End(R_i)` per summand of the
/// canonical form.
pub fn end_regular_part(m: &FormalConnection) -> Result<Vec<RegularPart>> {
    let c = m.canonicalize()?;
    c.summands
        .iter()
        .map(|el| {
            let end = jordan_tensor(&el.reg().dual(), el.reg());
            end.pushforward(el.p())
        })
        .collect()
}

/// Rank-one determinant over the base variable:
/// `det El(c u^p, phi, R) = E^{r Tr phi} (x) det R (x) (t^{(p-1) r / 2})`.
///
/// `Tr phi` is the trace along `t = c u^p`: the exponents of `phi` divisible
/// by `p`, with `phi_{pj} u^{pj}` becoming `p phi_{pj} c^{-j} t^j`. The half
/// integer twist enters only through its monodromy `(-1)^{(p-1) r}`.
pub fn determinant(el: &ElementaryConnection) -> Result<ElementaryConnection> {
    let n = el.normalize_ramification()?;
    let (p, r) = (n.p() as i64, n.r() as i64);
    let c_inv = n.rho().leading_coefficient().inverse()?;
    let mut terms = Vec::new();
    for (k, x) in n.phi().series().terms() {
        if k % p == 0 {
            let j = k / p;
            let coeff = x.checked_mul(&c_inv.pow(j)?)?.scale(&num_rational::BigRational::from_integer((p * r).into()));
            terms.push((j, coeff.simplify()));
        }
    }
    let tr = LaurentSeries::from_terms(VAR, terms, Precision::Exact);
    let mut mono = n.reg().det_monodromy();
    if ((p - 1) * r) % 2 != 0 {
        mono = -mono;
    }
    let reg = RegularPart::from_pairs([(mono.simplify(), 1)])?;
    ElementaryConnection::unramified(&tr, reg)
}

/// Checks the precondition shared by the structural operations on sums.
pub fn require_nonempty(m: &FormalConnection) -> Result<()> {
    if m.summands.is_empty() {
        Err(ConnectionError::Precondition("empty direct sum".into()))
    } else {
        Ok(())
    }
}
