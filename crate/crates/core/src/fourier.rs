//! Local Fourier-Laplace transforms of elementary connections and the
//! stationary-phase assembly at infinity.

use std::fmt;

use crate::connection::{
    ConnectionError, ElementaryConnection, FormalConnection, JordanBlock, RamificationMap, RegularPart, Result, VAR,
};
use crate::exactfield::FieldElement;
use crate::series::{working_window, LaurentSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn opposite(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    fn unit(self) -> FieldElement {
        match self {
            Sign::Plus => FieldElement::one(),
            Sign::Minus => -FieldElement::one(),
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

/// Nearby cycles `psi` of a regular germ together with the image `phi` of `T - Id`.
#[derive(Debug, Clone)]
pub struct RegularGermData {
    pub psi: RegularPart,
    pub phi: RegularPart,
    pub kappa: usize,
}

impl RegularGermData {
    pub fn new(psi: RegularPart) -> Self {
        let mut blocks = Vec::new();
        let mut kappa = 0;
        for b in psi.blocks() {
            if b.eigenvalue.is_one() {
                kappa += 1;
                if b.size > 1 {
                    blocks.push(JordanBlock::new(b.eigenvalue.clone(), b.size - 1));
                }
            } else {
                blocks.push(b.clone());
            }
        }
        let phi = RegularPart::new(blocks).expect("shrunk blocks stay valid");
        RegularGermData { psi, phi, kappa }
    }

    pub fn empty() -> Self {
        Self::new(RegularPart::empty())
    }
}

#[derive(Debug, Clone)]
pub enum Location {
    Finite(FieldElement),
    Infinity,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Finite(s) => f.write_str(&crate::connection::format_eigenvalue(s)),
            Location::Infinity => f.write_str("inf"),
        }
    }
}

/// The formal structure of a connection at one singular point.
///
/// At a finite point `summands` holds the irregular summands and `germ` the
/// regular germ. At infinity `summands` holds the slope > 1 part, `slope_one`
/// pairs `(s, N)` standing for `E^{s t} (x) N`, `below_one` the irregular
/// summands of slope < 1, and `germ.psi` the regular part.
#[derive(Debug, Clone)]
pub struct SingularityDatum {
    pub location: Location,
    pub summands: Vec<ElementaryConnection>,
    pub germ: RegularGermData,
    pub slope_one: Vec<(FieldElement, ElementaryConnection)>,
    pub below_one: Vec<ElementaryConnection>,
}

impl SingularityDatum {
    /// Regular summands are folded into the germ.
    pub fn finite(s: FieldElement, psi: RegularPart, summands: Vec<ElementaryConnection>) -> Result<Self> {
        let mut psi = psi;
        let mut irregular = Vec::new();
        for el in summands {
            let el = el.reduce_minimal()?;
            if el.q() == 0 {
                psi = psi.direct_sum(el.reg());
            } else {
                irregular.push(el);
            }
        }
        Ok(SingularityDatum {
            location: Location::Finite(s),
            summands: irregular,
            germ: RegularGermData::new(psi),
            slope_one: Vec::new(),
            below_one: Vec::new(),
        })
    }

    /// Splits the summands at infinity by slope.
    pub fn infinity(summands: Vec<ElementaryConnection>) -> Result<Self> {
        let mut d = SingularityDatum {
            location: Location::Infinity,
            summands: Vec::new(),
            germ: RegularGermData::empty(),
            slope_one: Vec::new(),
            below_one: Vec::new(),
        };
        let mut psi = RegularPart::empty();
        for el in summands {
            let el = el.reduce_minimal()?;
            let (p, q) = (el.p(), el.q());
            if q == 0 {
                psi = psi.direct_sum(el.reg());
            } else if q > p {
                d.summands.push(el);
            } else if q < p {
                d.below_one.push(el);
            } else {
                d.slope_one.push(split_slope_one(&el)?);
            }
        }
        d.germ = RegularGermData::new(psi);
        Ok(d)
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self.location, Location::Infinity)
    }

    /// Every elementary summand in full, the regular part included as `El(u, 0, psi)`.
    pub fn all_summands(&self) -> Result<Vec<ElementaryConnection>> {
        let mut out = Vec::new();
        if !self.germ.psi.is_empty() {
            out.push(ElementaryConnection::regular(self.germ.psi.clone()));
        }
        out.extend(self.summands.iter().cloned());
        for (s, n) in &self.slope_one {
            out.push(join_slope_one(s, n)?);
        }
        out.extend(self.below_one.iter().cloned());
        Ok(out)
    }

    /// Rank of the local formal connection.
    pub fn rank(&self) -> Result<usize> {
        Ok(self.all_summands()?.iter().map(ElementaryConnection::rank).sum())
    }
}

/// `El(c u^p, phi, R)` of slope one as `(s, El(c u^p, phi - s/(c u^p), R))`.
fn split_slope_one(el: &ElementaryConnection) -> Result<(FieldElement, ElementaryConnection)> {
    let el = el.normalize_ramification()?;
    let p = el.p() as i64;
    let c = el.rho().leading_coefficient();
    let top = el.phi().series().coeff(-p);
    let s = (&c * &top).simplify();
    let rest = LaurentSeries::from_terms(
        VAR,
        el.phi().series().terms().filter(|(k, _)| *k != -p).map(|(k, x)| (k, x.clone())),
        crate::series::Precision::Exact,
    );
    let residual = ElementaryConnection::new(el.rho().clone(), &rest, el.reg().clone())?;
    Ok((s, residual))
}

fn join_slope_one(s: &FieldElement, n: &ElementaryConnection) -> Result<ElementaryConnection> {
    let w = working_window(n.p() as i64, n.p() as i64);
    let inv = n.rho().series().inverse(w + n.p() as i64)?.principal_part()?;
    let phi = n.phi().series().add(&inv.scale(s));
    ElementaryConnection::new(n.rho().clone(), &phi, n.reg().clone())
}

/// A quotient of Laurent series, kept unexpanded until needed.
#[derive(Debug, Clone)]
struct Frac {
    num: LaurentSeries,
    den: LaurentSeries,
}

impl Frac {
    fn series(s: LaurentSeries) -> Frac {
        Frac { num: s, den: LaurentSeries::constant(VAR, FieldElement::one()) }
    }

    fn of_rho(rho: &RamificationMap) -> Frac {
        match rho.provenance() {
            Some((n, d)) => Frac { num: n.clone(), den: d.clone() },
            None => Frac::series(rho.series().clone()),
        }
    }

    fn reduced(self) -> Frac {
        if self.den.as_monomial().is_some_and(|(c, k)| k == 0 && c.is_one()) {
            return self;
        }
        match self.num.div(&self.den, 1) {
            Ok(q) if q.is_exact() && self.num.is_exact() => Frac::series(q),
            _ => self,
        }
    }

    fn mul(&self, o: &Frac) -> Frac {
        Frac { num: self.num.mul(&o.num), den: self.den.mul(&o.den) }.reduced()
    }

    fn div(&self, o: &Frac) -> Frac {
        Frac { num: self.num.mul(&o.den), den: self.den.mul(&o.num) }.reduced()
    }

    fn add(&self, o: &Frac) -> Frac {
        let num = self.num.mul(&o.den).add(&o.num.mul(&self.den));
        Frac { num, den: self.den.mul(&o.den) }.reduced()
    }

    fn scale(&self, c: &FieldElement) -> Frac {
        Frac { num: self.num.scale(c), den: self.den.clone() }
    }

    fn derivative(&self) -> Frac {
        let num = self.num.derivative().mul(&self.den).sub(&self.num.mul(&self.den.derivative()));
        Frac { num, den: self.den.mul(&self.den) }.reduced()
    }

    fn expand(&self, window: i64) -> Result<LaurentSeries> {
        Ok(self.num.div(&self.den, window)?)
    }

    fn is_exact(&self) -> bool {
        self.num.is_exact() && self.den.is_exact()
    }
}

fn assemble(rho: Frac, phi: Frac, reg: RegularPart, window: i64) -> Result<ElementaryConnection> {
    let series = rho.expand(window)?.map_coeffs(FieldElement::simplify);
    let mut map = RamificationMap::new(series)?;
    if rho.is_exact() {
        map = map.with_provenance(rho.num.clone(), rho.den.clone());
    }
    let phi = phi.expand(window)?.principal_part()?.map_coeffs(FieldElement::simplify);
    ElementaryConnection::new(map, &phi, reg)
}

fn window_for(el: &ElementaryConnection) -> i64 {
    working_window((el.p() + el.q()) as i64, el.q() as i64)
}

/// `F^(0,inf)`: `rho^ = -+ rho'/phi'`, `phi^ = phi - (rho/rho') phi'`, `R^ = R (x) L_q`.
pub fn fourier_0_inf(el: &ElementaryConnection, sign: Sign) -> Result<ElementaryConnection> {
    let q = el.q();
    if q == 0 {
        return Err(ConnectionError::Precondition("F^(0,inf) needs an irregular input (q >= 1)".into()));
    }
    let rho = Frac::of_rho(el.rho());
    let phi = Frac::series(el.phi().series().clone());
    let (drho, dphi) = (rho.derivative(), phi.derivative());
    let rho_hat = drho.div(&dphi).scale(&sign.opposite().unit());
    let phi_hat = phi.add(&rho.mul(&dphi).div(&drho).scale(&-FieldElement::one()));
    assemble(rho_hat, phi_hat, el.reg().twist_sign(q as i64), window_for(el))
}

/// `F^(inf,0)`: `rho^ = +- sigma^2 psi'/sigma'`, `phi^ = psi + (sigma/sigma') psi'`.
pub fn fourier_inf_0(el: &ElementaryConnection, sign: Sign) -> Result<ElementaryConnection> {
    let (p, q) = (el.p(), el.q());
    if q == 0 || q >= p {
        return Err(ConnectionError::Precondition(format!(
            "F^(inf,0) needs 0 < slope < 1, got q/p = {q}/{p}"
        )));
    }
    let sigma = Frac::of_rho(el.rho());
    let psi = Frac::series(el.phi().series().clone());
    let (dsigma, dpsi) = (sigma.derivative(), psi.derivative());
    let rho_hat = sigma.mul(&sigma).mul(&dpsi).div(&dsigma).scale(&sign.unit());
    let phi_hat = psi.add(&sigma.mul(&dpsi).div(&dsigma));
    assemble(rho_hat, phi_hat, el.reg().twist_sign(q as i64), window_for(el))
}

/// `F^(inf,inf)`: `rho^ = +- rho'/(phi' rho^2)`, `phi^ = phi + (rho/rho') phi'`.
pub fn fourier_inf_inf(el: &ElementaryConnection, sign: Sign) -> Result<ElementaryConnection> {
    let (p, q) = (el.p(), el.q());
    if q <= p {
        return Err(ConnectionError::Precondition(format!(
            "F^(inf,inf) needs slope > 1, got q/p = {q}/{p}"
        )));
    }
    let rho = Frac::of_rho(el.rho());
    let phi = Frac::series(el.phi().series().clone());
    let (drho, dphi) = (rho.derivative(), phi.derivative());
    let rho_hat = drho.div(&dphi.mul(&rho).mul(&rho)).scale(&sign.unit());
    let phi_hat = phi.add(&rho.mul(&dphi).div(&drho));
    assemble(rho_hat, phi_hat, el.reg().twist_sign(q as i64), window_for(el))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RegularMode {
    /// Minimal extension: the transform sees `(phi, T)`.
    #[default]
    MinimalExtension,
    /// Plain regular connection: `psi` is returned unchanged.
    Plain,
}

pub fn fourier_regular(g: &RegularGermData) -> RegularPart {
    fourier_regular_mode(g, RegularMode::MinimalExtension)
}

pub fn fourier_regular_mode(g: &RegularGermData, mode: RegularMode) -> RegularPart {
    match mode {
        RegularMode::MinimalExtension => g.phi.clone(),
        RegularMode::Plain => g.psi.clone(),
    }
}

/// `F^(s,inf) = E^{+-s/theta} (x) F^(0,inf)` on an irregular summand at `s`.
pub fn fourier_s_inf(el: &ElementaryConnection, s: &FieldElement, sign: Sign) -> Result<ElementaryConnection> {
    let base = fourier_0_inf(el, sign)?;
    if s.is_zero() {
        return Ok(base);
    }
    let w = window_for(&base) + base.p() as i64;
    let inv = Frac::of_rho(base.rho()).expand(w)?.inverse(w)?.principal_part()?;
    let phi = base.phi().series().add(&inv.scale(&(&sign.unit() * s)));
    ElementaryConnection::new(base.rho().clone(), &phi.map_coeffs(FieldElement::simplify), base.reg().clone())
}

/// `F^(s,inf)` on a regular germ: `El(u, +-s/u, phi)`.
pub fn fourier_s_inf_germ(g: &RegularGermData, s: &FieldElement, sign: Sign) -> Result<ElementaryConnection> {
    let reg = fourier_regular(g);
    let phi = LaurentSeries::monomial(VAR, (&sign.unit() * s).simplify(), -1);
    ElementaryConnection::unramified(&phi, reg)
}

/// The formal structure at infinity of the Laplace transform, assuming `M = M_min`.
pub fn stationary_phase_at_infinity(data: &[SingularityDatum], sign: Sign) -> Result<FormalConnection> {
    stationary_phase_with_flag(data, sign, true)
}

pub fn stationary_phase_with_flag(
    data: &[SingularityDatum],
    sign: Sign,
    minimal_extension: bool,
) -> Result<FormalConnection> {
    let mut out = Vec::new();
    for d in data {
        match &d.location {
            Location::Finite(s) => {
                if !d.slope_one.is_empty() || !d.below_one.is_empty() {
                    return Err(ConnectionError::Precondition(format!("slope split data at finite point {s}")));
                }
                let mode = if minimal_extension { RegularMode::MinimalExtension } else { RegularMode::Plain };
                let reg = fourier_regular_mode(&d.germ, mode);
                if !reg.is_empty() {
                    let g = RegularGermData { phi: reg, ..d.germ.clone() };
                    out.push(fourier_s_inf_germ(&g, s, sign)?);
                }
                for el in &d.summands {
                    out.push(fourier_s_inf(el, s, sign)?);
                }
            }
            Location::Infinity => {
                for el in &d.summands {
                    if el.q() <= el.p() {
                        return Err(ConnectionError::Precondition(format!(
                            "summand of slope {}/{} in the slope > 1 part at infinity",
                            el.q(),
                            el.p()
                        )));
                    }
                    out.push(fourier_inf_inf(el, sign)?);
                }
            }
        }
    }
    let mut m = FormalConnection::new(out).canonicalize()?;
    m.provenance.push(format!("stationary phase, sign {sign}"));
    m.provenance.push(format!("minimal extension assumed: {minimal_extension}"));
    Ok(m)
}

/// The datum at the transformed infinity produced by [`stationary_phase_at_infinity`].
pub fn transformed_infinity(data: &[SingularityDatum], sign: Sign) -> Result<SingularityDatum> {
    SingularityDatum::infinity(stationary_phase_at_infinity(data, sign)?.summands)
}
