//! Elementary connections `El(rho, phi, R)` and finite direct sums of them.
//!
//! Conventions:
//! - `rho` and `phi` are series in the variable `u`;
//! - `phi` is stored as its principal part;
//! - `R` is stored as Jordan data `(eigenvalue : block size)` of its formal monodromy.
//!
//! The canonical ramification is a monomial `c*u^p`. When `p = 1` the
//! constant is scaled away. When `p > 1` it is kept: removing it would
//! generally require adjoining a `p`-th root of `c`. Isomorphism tests
//! account for the constant explicitly.

use std::cmp::Ordering;
use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;
use thiserror::Error;

use crate::exactfield::{FieldElement, FieldError};
use crate::series::{working_window, LaurentSeries, Precision, SeriesError};

pub const VAR: &str = "u";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConnectionError {
    #[error("invalid ramification: {0}")]
    InvalidRamification(String),
    #[error("invalid Jordan data: {0}")]
    InvalidJordan(String),
    #[error("{d} does not divide {p}")]
    NotDivisible { d: usize, p: usize },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

pub type Result<T> = std::result::Result<T, ConnectionError>;

#[derive(Debug, Clone)]
pub struct JordanBlock {
    pub eigenvalue: FieldElement,
    pub size: usize,
}

impl JordanBlock {
    pub fn new(eigenvalue: FieldElement, size: usize) -> Self {
        JordanBlock { eigenvalue, size }
    }

    fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.eigenvalue.canonical_cmp(&other.eigenvalue).then(self.size.cmp(&other.size))
    }
}

impl PartialEq for JordanBlock {
    fn eq(&self, other: &Self) -> bool {
        self.size == other.size && self.eigenvalue == other.eigenvalue
    }
}

/// Prints an eigenvalue: integers plainly, everything else in field syntax.
pub fn format_eigenvalue(e: &FieldElement) -> String {
    match e.to_rational() {
        Some(q) if q.is_integer() => q.numer().to_string(),
        _ => e.to_string(),
    }
}

impl fmt::Display for JordanBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}:{})", format_eigenvalue(&self.eigenvalue), self.size)
    }
}

/// Jordan data of a monodromy, kept sorted so equality is multiset equality.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RegularPart {
    blocks: Vec<JordanBlock>,
}

impl RegularPart {
    pub fn new(blocks: Vec<JordanBlock>) -> Result<Self> {
        for b in &blocks {
            if b.eigenvalue.is_zero() {
                return Err(ConnectionError::InvalidJordan("eigenvalue 0".into()));
            }
            if b.size == 0 {
                return Err(ConnectionError::InvalidJordan("block of size 0".into()));
            }
        }
        Ok(Self::from_sorted(blocks))
    }

    fn from_sorted(mut blocks: Vec<JordanBlock>) -> Self {
        blocks.sort_by(JordanBlock::canonical_cmp);
        RegularPart { blocks }
    }

    /// `(eigenvalue, size)` pairs, for brevity in tests and examples.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (FieldElement, usize)>) -> Result<Self> {
        Self::new(pairs.into_iter().map(|(e, s)| JordanBlock::new(e, s)).collect())
    }

    /// Identity monodromy of rank `r`.
    pub fn trivial(r: usize) -> Self {
        Self::from_sorted((0..r).map(|_| JordanBlock::new(FieldElement::one(), 1)).collect())
    }

    pub fn empty() -> Self {
        RegularPart::default()
    }

    pub fn blocks(&self) -> &[JordanBlock] {
        &self.blocks
    }

    pub fn rank(&self) -> usize {
        self.blocks.iter().map(|b| b.size).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        Self::from_sorted(self.blocks.iter().chain(&other.blocks).cloned().collect())
    }

    pub fn map_eigenvalues(&self, f: impl Fn(&FieldElement) -> FieldElement) -> Self {
        Self::from_sorted(self.blocks.iter().map(|b| JordanBlock::new(f(&b.eigenvalue), b.size)).collect())
    }

    /// Tensor with the rank-one regular connection of monodromy `(-1)^q`.
    pub fn twist_sign(&self, q: i64) -> Self {
        if q % 2 == 0 {
            self.clone()
        } else {
            self.map_eigenvalues(|e| -e)
        }
    }

    pub fn dual(&self) -> Self {
        self.map_eigenvalues(|e| e.inverse().expect("eigenvalues are nonzero"))
    }

    /// Pull-back along a ramification of degree `k`: eigenvalues to the `k`-th power.
    pub fn pullback(&self, k: usize) -> Self {
        self.map_eigenvalues(|e| e.pow(k as i64).expect("eigenvalues are nonzero"))
    }

    /// Push-forward along `u -> u^p`: each block `(l, b)` becomes the blocks
    /// `(l^{1/p} zeta, b)` for `zeta^p = 1`, with the canonical root.
    pub fn pushforward(&self, p: usize) -> Result<Self> {
        let mut out = Vec::with_capacity(self.blocks.len() * p);
        for b in &self.blocks {
            let root = b.eigenvalue.adjoin_root(p)?;
            for j in 0..p {
                let e = &root * &FieldElement::zeta_pow(p as u64, j as i64);
                out.push(JordanBlock::new(e.simplify(), b.size));
            }
        }
        Ok(Self::from_sorted(out))
    }

    /// Product of eigenvalues counted with block size.
    pub fn det_monodromy(&self) -> FieldElement {
        self.blocks
            .iter()
            .fold(FieldElement::one(), |acc, b| acc * b.eigenvalue.pow(b.size as i64).unwrap())
    }

    fn canonical_cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.blocks.iter().zip(&other.blocks) {
            let o = a.canonical_cmp(b);
            if o != Ordering::Equal {
                return o;
            }
        }
        self.blocks.len().cmp(&other.blocks.len())
    }
}

impl fmt::Display for RegularPart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{b}")?;
        }
        write!(f, "]")
    }
}

/// A ramification `u -> rho(u)` of degree `p = val(rho)`.
#[derive(Debug, Clone)]
pub struct RamificationMap {
    series: LaurentSeries,
    degree: usize,
    /// Exact numerator and denominator when `rho` is a ratio of Laurent polynomials.
    provenance: Option<(LaurentSeries, LaurentSeries)>,
}

impl RamificationMap {
    pub fn new(series: LaurentSeries) -> Result<Self> {
        match series.valuation() {
            Some(v) if v >= 1 => Ok(RamificationMap { degree: v as usize, series, provenance: None }),
            Some(v) => Err(ConnectionError::InvalidRamification(format!("valuation {v} < 1"))),
            None => Err(ConnectionError::InvalidRamification("zero series".into())),
        }
    }

    /// `c * u^p`.
    pub fn monomial(c: FieldElement, p: usize) -> Self {
        Self::new(LaurentSeries::monomial(VAR, c, p as i64)).expect("monomial ramification")
    }

    pub fn identity() -> Self {
        Self::monomial(FieldElement::one(), 1)
    }

    pub fn with_provenance(mut self, num: LaurentSeries, den: LaurentSeries) -> Self {
        self.provenance = Some((num, den));
        self
    }

    pub fn series(&self) -> &LaurentSeries {
        &self.series
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn provenance(&self) -> Option<&(LaurentSeries, LaurentSeries)> {
        self.provenance.as_ref()
    }

    pub fn leading_coefficient(&self) -> FieldElement {
        self.series.leading_coefficient().unwrap().clone()
    }

    /// `Some(c)` when the map is exactly `c * u^p`.
    pub fn as_monomial(&self) -> Option<FieldElement> {
        self.series.as_monomial().map(|(c, _)| c)
    }
}

/// The exponential factor `E^phi`, kept as the principal part of `phi`.
#[derive(Debug, Clone)]
pub struct ExponentialFactor {
    series: LaurentSeries,
    q: usize,
}

impl ExponentialFactor {
    pub fn new(phi: &LaurentSeries) -> Result<Self> {
        let series = phi.principal_part()?;
        let q = series.valuation().map_or(0, |v| (-v) as usize);
        Ok(ExponentialFactor { series, q })
    }

    pub fn zero() -> Self {
        ExponentialFactor { series: LaurentSeries::zero(VAR), q: 0 }
    }

    pub fn series(&self) -> &LaurentSeries {
        &self.series
    }

    pub fn pole_order(&self) -> usize {
        self.q
    }

    pub fn is_zero(&self) -> bool {
        self.q == 0
    }

    /// Exponents carrying a nonzero coefficient.
    pub fn support(&self) -> Vec<i64> {
        self.series.terms().map(|(k, _)| k).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Invariants {
    pub slope: Ratio<i64>,
    pub irregularity: i64,
    pub rank: i64,
}

#[derive(Debug, Clone)]
pub struct ElementaryConnection {
    rho: RamificationMap,
    phi: ExponentialFactor,
    reg: RegularPart,
}

impl ElementaryConnection {
    pub fn new(rho: RamificationMap, phi: &LaurentSeries, reg: RegularPart) -> Result<Self> {
        Ok(ElementaryConnection { rho, phi: ExponentialFactor::new(phi)?, reg })
    }

    /// `El(c*u^p, phi, R)`.
    pub fn monomial(c: FieldElement, p: usize, phi: &LaurentSeries, reg: RegularPart) -> Result<Self> {
        Self::new(RamificationMap::monomial(c, p), phi, reg)
    }

    /// `El(u, phi, R)`.
    pub fn unramified(phi: &LaurentSeries, reg: RegularPart) -> Result<Self> {
        Self::new(RamificationMap::identity(), phi, reg)
    }

    /// The regular connection `El(u, 0, R)`.
    pub fn regular(reg: RegularPart) -> Self {
        ElementaryConnection { rho: RamificationMap::identity(), phi: ExponentialFactor::zero(), reg }
    }

    pub fn rho(&self) -> &RamificationMap {
        &self.rho
    }

    pub fn phi(&self) -> &ExponentialFactor {
        &self.phi
    }

    pub fn reg(&self) -> &RegularPart {
        &self.reg
    }

    pub fn with_reg(&self, reg: RegularPart) -> Self {
        ElementaryConnection { reg, ..self.clone() }
    }

    pub fn p(&self) -> usize {
        self.rho.degree
    }

    pub fn q(&self) -> usize {
        self.phi.q
    }

    pub fn r(&self) -> usize {
        self.reg.rank()
    }

    pub fn rank(&self) -> usize {
        self.p() * self.r()
    }

    pub fn irregularity(&self) -> usize {
        self.q() * self.r()
    }

    pub fn invariants(&self) -> Invariants {
        Invariants {
            slope: Ratio::new(self.q() as i64, self.p() as i64),
            irregularity: self.irregularity() as i64,
            rank: self.rank() as i64,
        }
    }

    /// Whether the ramification is the canonical monomial (with `c = 1` when `p = 1`).
    pub fn is_normalized(&self) -> bool {
        match self.rho.as_monomial() {
            Some(c) => self.p() > 1 || c.is_one(),
            None => false,
        }
    }

    fn window(&self) -> i64 {
        working_window(self.p() as i64, self.q() as i64)
    }

    /// Replaces `rho` by the monomial `c*u^p` (`u` when `p = 1`) and `phi` by `phi o lambda`.
    pub fn normalize_ramification(&self) -> Result<Self> {
        if self.is_normalized() {
            return Ok(self.clone());
        }
        // only the principal part of phi o lambda survives: relative order q suffices
        let w = self.window().min(self.q() as i64 + 2);
        let p = self.p();
        let c = self.rho.leading_coefficient();
        let lambda = if p == 1 {
            self.rho.series.reversion(w)?
        } else {
            let sigma = self.rho.series.scale(&c.inverse()?).nth_root(p, w)?;
            sigma.reversion(w)?
        };
        let phi = self.phi.series.compose(&lambda, w)?;
        let rho = if p == 1 { RamificationMap::identity() } else { RamificationMap::monomial(c, p) };
        Self::new(rho, &phi, self.reg.clone())
    }

    /// A presentation with `rho = u^p` exactly, adjoining `c^{1/p}` when needed.
    pub fn normalize_monic(&self) -> Result<Self> {
        let n = self.normalize_ramification()?;
        let c = n.rho.leading_coefficient();
        if c.is_one() {
            return Ok(n);
        }
        // c u^p = (beta u)^p with beta = c^{1/p}
        let beta = c.adjoin_root(n.p())?;
        let phi = n.phi.series.compose(&LaurentSeries::monomial(VAR, beta.inverse()?, 1), 1)?;
        Self::monomial(FieldElement::one(), n.p(), &phi, n.reg)
    }

    /// Removes any sub-ramification through which `phi` factors.
    pub fn reduce_minimal(&self) -> Result<Self> {
        let n = self.normalize_ramification()?;
        let p = n.p();
        let d = n.phi.support().iter().fold(p as i64, |g, k| g.gcd(k)) as usize;
        if d == 1 {
            return Ok(n);
        }
        let c = n.rho.leading_coefficient();
        let phi = LaurentSeries::from_terms(
            VAR,
            n.phi.series.terms().map(|(k, x)| (k / d as i64, x.clone())),
            Precision::Exact,
        );
        let reg = n.reg.pushforward(d)?;
        Self::monomial(c, p / d, &phi, reg)?.normalize_ramification()
    }

    /// Whether `phi` factors through no nontrivial sub-ramification.
    pub fn is_minimal(&self) -> bool {
        self.phi.support().iter().fold(self.p() as i64, |g, k| g.gcd(k)) == 1
    }

    /// `phi o mu_zeta`, i.e. the substitution `u -> zeta u` (with `rho` compensated).
    pub fn rotate(&self, zeta: &FieldElement) -> Result<Self> {
        let sub = LaurentSeries::monomial(VAR, zeta.clone(), 1);
        let phi = self.phi.series.compose(&sub, 1)?;
        let rho = self.rho.series.compose(&sub, self.window())?;
        Self::new(RamificationMap::new(rho)?, &phi, self.reg.clone())
    }

    /// The pull-back along `t = c s^d` of `El(c*u^p, phi, R)`, as the sum over
    /// `k < d` of `El(u^{p/d}, phi o mu_{zeta_p^k}, R)`.
    pub fn pullback_decompose(&self, d: usize) -> Result<FormalConnection> {
        let n = self.normalize_ramification()?;
        let p = n.p();
        if d == 0 || p % d != 0 {
            return Err(ConnectionError::NotDivisible { d, p });
        }
        if d == 1 {
            return Ok(FormalConnection::new(vec![self.clone()]));
        }
        let mut out = Vec::with_capacity(d);
        for k in 0..d {
            let z = FieldElement::zeta_pow(p as u64, k as i64);
            let phi = n.phi.series.compose(&LaurentSeries::monomial(VAR, z, 1), 1)?;
            let phi = phi.map_coeffs(FieldElement::simplify);
            out.push(Self::monomial(FieldElement::one(), p / d, &phi, n.reg.clone())?);
        }
        let mut m = FormalConnection::new(out);
        m.provenance.push(format!("pull-back along t = c*s^{d}"));
        Ok(m)
    }

    /// Witness `beta` with `rho_b(beta u) = rho_a(u)` and `phi_b(beta u) = phi_a(u)`
    /// for the exponential types of two minimal connections (Jordan data ignored).
    pub fn exponential_type_witness(a: &Self, b: &Self) -> Result<Option<FieldElement>> {
        if a.p() != b.p() || a.q() != b.q() || a.phi.support() != b.phi.support() {
            return Ok(None);
        }
        let p = a.p() as i64;
        // beta^s = value, for s in {p} and the support of phi
        let mut constraints = vec![(p, a.rho.leading_coefficient().checked_div(&b.rho.leading_coefficient())?)];
        for k in a.phi.support() {
            let v = a.phi.series.coeff(k).checked_div(&b.phi.series.coeff(k))?;
            constraints.push((k, v));
        }
        let (g, coeffs) = bezout(&constraints.iter().map(|(s, _)| *s).collect::<Vec<_>>());
        if g != 1 {
            return Err(ConnectionError::Precondition("exponential type is not minimal".into()));
        }
        let mut beta = FieldElement::one();
        for ((_, v), n) in constraints.iter().zip(&coeffs) {
            if *n != 0 {
                beta = beta.checked_mul(&v.pow(*n)?)?;
            }
        }
        for (s, v) in &constraints {
            if beta.pow(*s)? != *v {
                return Ok(None);
            }
        }
        Ok(Some(beta.simplify()))
    }

    /// `Some(beta)` when the two connections are isomorphic, `beta` being the
    /// change of variable `u -> beta u` (a root of unity when both `rho` agree).
    pub fn is_isomorphic_elementary(a: &Self, b: &Self) -> Result<Option<FieldElement>> {
        let a = a.reduce_minimal()?;
        let b = b.reduce_minimal()?;
        if a.reg != b.reg {
            return Ok(None);
        }
        Self::exponential_type_witness(&a, &b)
    }

    /// Sort key for canonical ordering.
    fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.p()
            .cmp(&other.p())
            .then(self.q().cmp(&other.q()))
            .then_with(|| self.phi.series.canonical_cmp(&other.phi.series))
            .then_with(|| self.rho.leading_coefficient().canonical_cmp(&other.rho.leading_coefficient()))
            .then_with(|| self.reg.canonical_cmp(&other.reg))
    }

    /// Exact structural equality of the presentation.
    /// Argument in `[0, 2pi)` of `-c * phi_{-q}`, the key selecting among rotations.
    fn leading_argument(&self) -> f64 {
        if self.q() == 0 {
            return 0.0;
        }
        let c = self.rho.leading_coefficient().approx();
        let lead = self.phi.series.coeff(-(self.q() as i64)).approx();
        let w = -(c * lead);
        let a = w.im.atan2(w.re);
        let a = if a < -1e-12 { a + 2.0 * std::f64::consts::PI } else { a.max(0.0) };
        if (a - 2.0 * std::f64::consts::PI).abs() < 1e-12 {
            0.0
        } else {
            a
        }
    }

    fn representative_cmp(&self, other: &Self) -> Ordering {
        let (a, b) = (self.leading_argument(), other.leading_argument());
        if (a - b).abs() > 1e-9 {
            return a.partial_cmp(&b).unwrap_or(Ordering::Equal);
        }
        self.canonical_cmp(other)
    }

    pub fn same_presentation(&self, other: &Self) -> bool {
        self.rho.series == other.rho.series && self.phi.series == other.phi.series && self.reg == other.reg
    }
}

impl fmt::Display for ElementaryConnection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_normalized() && self.p() == 1 && self.phi.is_zero() {
            return write!(f, "Reg(R={})", self.reg);
        }
        write!(f, "El(rho={}, phi={}, R={})", self.rho.series, self.phi.series, self.reg)
    }
}

/// Integer combination of `xs` equal to their gcd.
fn bezout(xs: &[i64]) -> (i64, Vec<i64>) {
    let mut g = 0i64;
    let mut coeffs: Vec<i64> = Vec::with_capacity(xs.len());
    for &x in xs {
        let e = g.extended_gcd(&x);
        // e.gcd = e.x * g + e.y * x
        for c in coeffs.iter_mut() {
            *c *= e.x;
        }
        coeffs.push(e.y);
        g = e.gcd;
    }
    if g < 0 {
        g = -g;
        for c in coeffs.iter_mut() {
            *c = -*c;
        }
    }
    (g, coeffs)
}

/// A finite direct sum of elementary connections.
#[derive(Debug, Clone, Default)]
pub struct FormalConnection {
    pub summands: Vec<ElementaryConnection>,
    /// Free-form notes about reparametrizations and conventions applied.
    pub provenance: Vec<String>,
}

impl FormalConnection {
    pub fn new(summands: Vec<ElementaryConnection>) -> Self {
        FormalConnection { summands, provenance: Vec::new() }
    }

    pub fn single(el: ElementaryConnection) -> Self {
        Self::new(vec![el])
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut m = self.clone();
        m.summands.extend(other.summands.iter().cloned());
        m.provenance.extend(other.provenance.iter().cloned());
        m
    }

    pub fn rank(&self) -> usize {
        self.summands.iter().map(ElementaryConnection::rank).sum()
    }

    pub fn irregularity(&self) -> usize {
        self.summands.iter().map(ElementaryConnection::irregularity).sum()
    }

    pub fn slopes(&self) -> Vec<Ratio<i64>> {
        self.summands.iter().map(|e| e.invariants().slope).collect()
    }

    /// Normalized minimal summands, isomorphic exponential types merged, sorted.
    pub fn canonicalize(&self) -> Result<Self> {
        let mut groups: Vec<Vec<ElementaryConnection>> = Vec::new();
        for el in &self.summands {
            if el.r() == 0 {
                continue;
            }
            let el = el.reduce_minimal()?;
            let mut placed = false;
            for g in groups.iter_mut() {
                if ElementaryConnection::exponential_type_witness(&g[0], &el)?.is_some() {
                    g.push(el.clone());
                    placed = true;
                    break;
                }
            }
            if !placed {
                groups.push(vec![el]);
            }
        }
        let mut out = Vec::with_capacity(groups.len());
        for g in groups {
            let reg = g.iter().skip(1).fold(g[0].reg.clone(), |acc, e| acc.direct_sum(&e.reg));
            let mut best: Option<ElementaryConnection> = None;
            for member in &g {
                let p = member.p();
                for j in 0..p {
                    let cand = if j == 0 {
                        member.clone()
                    } else {
                        let rotated = member.rotate(&FieldElement::zeta_pow(p as u64, j as i64))?;
                        let phi = rotated.phi.series.map_coeffs(FieldElement::simplify);
                        ElementaryConnection::new(member.rho.clone(), &phi, member.reg.clone())?
                    };
                    let better = match &best {
                        None => true,
                        Some(b) => cand.representative_cmp(b) == Ordering::Less,
                    };
                    if better {
                        best = Some(cand);
                    }
                }
            }
            let rep = best.unwrap();
            let phi = rep.phi.series.map_coeffs(FieldElement::simplify);
            let rho = RamificationMap::monomial(rep.rho.leading_coefficient().simplify(), rep.p());
            out.push(ElementaryConnection::new(rho, &phi, reg.map_eigenvalues(FieldElement::simplify))?);
        }
        out.sort_by(|a, b| a.canonical_cmp(b));
        Ok(FormalConnection { summands: out, provenance: self.provenance.clone() })
    }

    pub fn is_isomorphic(a: &Self, b: &Self) -> Result<bool> {
        let a = a.canonicalize()?;
        let b = b.canonicalize()?;
        if a.summands.len() != b.summands.len() {
            return Ok(false);
        }
        let mut used = vec![false; b.summands.len()];
        'outer: for x in &a.summands {
            for (j, y) in b.summands.iter().enumerate() {
                if !used[j] && ElementaryConnection::is_isomorphic_elementary(x, y)?.is_some() {
                    used[j] = true;
                    continue 'outer;
                }
            }
            return Ok(false);
        }
        Ok(true)
    }
}

impl fmt::Display for FormalConnection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.summands.is_empty() {
            return write!(f, "Reg(R=[])");
        }
        for (i, s) in self.summands.iter().enumerate() {
            if i > 0 {
                write!(f, " (+) ")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> FieldElement {
        FieldElement::from_ratio(n, d)
    }

    fn phi(terms: &[(i64, FieldElement)]) -> LaurentSeries {
        LaurentSeries::from_terms(VAR, terms.iter().cloned(), Precision::Exact)
    }

    fn el(p: usize, terms: &[(i64, FieldElement)], reg: RegularPart) -> ElementaryConnection {
        ElementaryConnection::monomial(FieldElement::one(), p, &phi(terms), reg).unwrap()
    }

    #[test]
    fn invariants_examples() {
        let a = el(3, &[(-2, q(1, 1))], RegularPart::trivial(2));
        assert_eq!(
            a.invariants(),
            Invariants { slope: Ratio::new(2, 3), irregularity: 4, rank: 6 }
        );
        let b = ElementaryConnection::regular(RegularPart::trivial(3));
        assert_eq!(b.invariants(), Invariants { slope: Ratio::new(0, 1), irregularity: 0, rank: 3 });
        let c = el(2, &[(-3, q(1, 1))], RegularPart::trivial(1));
        assert_eq!(c.invariants(), Invariants { slope: Ratio::new(3, 2), irregularity: 3, rank: 2 });
    }

    #[test]
    fn normalization() {
        let a = el(1, &[(-2, q(5, 1))], RegularPart::trivial(1));
        assert!(a.normalize_ramification().unwrap().same_presentation(&a));

        let b = ElementaryConnection::monomial(q(2, 1), 1, &phi(&[(-1, q(1, 1))]), RegularPart::trivial(1))
            .unwrap()
            .normalize_ramification()
            .unwrap();
        assert!(b.same_presentation(&el(1, &[(-1, q(2, 1))], RegularPart::trivial(1))));

        // rho = u^2 (1 + u)
        let rho = LaurentSeries::from_terms(VAR, [(2, q(1, 1)), (3, q(1, 1))], Precision::Exact);
        let c = ElementaryConnection::new(RamificationMap::new(rho.clone()).unwrap(), &phi(&[(-1, q(1, 1))]), RegularPart::trivial(1))
            .unwrap();
        let n = c.normalize_ramification().unwrap();
        assert!(n.rho().as_monomial().unwrap().is_one());
        assert_eq!(n.p(), 2);
        // check against an independent computation: lambda with lambda^2 (1 + lambda) = u^2
        let w = 16;
        let sigma = rho.nth_root(2, w).unwrap();
        let lambda = sigma.reversion(w).unwrap();
        assert!(rho.compose(&lambda, w).unwrap().agrees_with(&LaurentSeries::monomial(VAR, q(1, 1), 2)));
        // phi o lambda = 1/lambda = u^-1 (1 - u/2 + ...)
        assert_eq!(n.phi().series(), &phi(&[(-1, q(1, 1))]));
    }

    #[test]
    fn minimal_reduction() {
        let a = el(4, &[(-2, q(1, 1))], RegularPart::trivial(1)).reduce_minimal().unwrap();
        assert_eq!(a.p(), 2);
        assert_eq!(a.phi().series(), &phi(&[(-1, q(1, 1))]));
        assert_eq!(a.reg(), &RegularPart::from_pairs([(q(1, 1), 1), (q(-1, 1), 1)]).unwrap());

        let b = el(2, &[(-1, q(1, 1))], RegularPart::trivial(1));
        assert!(b.reduce_minimal().unwrap().same_presentation(&b));

        let c = el(6, &[(-4, q(1, 1)), (-2, q(1, 1))], RegularPart::trivial(1)).reduce_minimal().unwrap();
        assert_eq!(c.p(), 3);
        assert_eq!(c.phi().series(), &phi(&[(-2, q(1, 1)), (-1, q(1, 1))]));
        assert_eq!(c.r(), 2);
        for x in [&a, &c] {
            assert!(x.is_minimal());
        }
    }

    #[test]
    fn pullbacks() {
        let a = el(2, &[(-1, q(1, 1))], RegularPart::trivial(1));
        let m = a.pullback_decompose(2).unwrap();
        let expected = FormalConnection::new(vec![
            el(1, &[(-1, q(1, 1))], RegularPart::trivial(1)),
            el(1, &[(-1, q(-1, 1))], RegularPart::trivial(1)),
        ]);
        assert!(FormalConnection::is_isomorphic(&m, &expected).unwrap());
        assert!(a.pullback_decompose(1).unwrap().summands[0].same_presentation(&a));

        let b = el(4, &[(-1, q(1, 1))], RegularPart::trivial(1));
        let m = b.pullback_decompose(2).unwrap();
        assert_eq!(m.summands.len(), 2);
        assert_eq!(m.summands[0].phi().series(), &phi(&[(-1, q(1, 1))]));
        assert_eq!(m.summands[1].phi().series(), &phi(&[(-1, FieldElement::zeta_pow(4, -1))]));
        assert_eq!(m.rank(), b.rank());
        assert_eq!(m.irregularity(), 2 * b.irregularity());
        assert!(matches!(b.pullback_decompose(3), Err(ConnectionError::NotDivisible { .. })));
    }

    #[test]
    fn isomorphism_examples() {
        let r = RegularPart::from_pairs([(FieldElement::zeta(3), 2)]).unwrap();
        let a = el(2, &[(-1, q(1, 1))], r.clone());
        let b = el(2, &[(-1, q(-1, 1))], r.clone());
        let w = ElementaryConnection::is_isomorphic_elementary(&a, &b).unwrap().unwrap();
        assert_eq!(w, q(-1, 1));
        let c = el(2, &[(-1, q(2, 1))], r.clone());
        assert!(ElementaryConnection::is_isomorphic_elementary(&a, &c).unwrap().is_none());
        assert!(ElementaryConnection::is_isomorphic_elementary(&a, &a).unwrap().unwrap().is_one());
        let d = el(1, &[(-2, q(1, 1))], RegularPart::trivial(1));
        let e = el(1, &[(-1, q(1, 1))], RegularPart::trivial(1));
        let ma = FormalConnection::new(vec![d.clone(), e.clone()]);
        let mb = FormalConnection::new(vec![e, d]);
        assert!(FormalConnection::is_isomorphic(&ma, &mb).unwrap());
        assert!(!FormalConnection::is_isomorphic(&FormalConnection::single(ma.summands[0].clone()), &FormalConnection::single(ma.summands[1].clone())).unwrap());
    }

    #[test]
    fn nonmonic_ramifications_compare() {
        // El(-u^2, 2u^-1) and El(u^2, 2i^-1 u^-1) differ by u -> i u
        let a = ElementaryConnection::monomial(q(-1, 1), 2, &phi(&[(-1, q(2, 1))]), RegularPart::trivial(1)).unwrap();
        let b = a.normalize_monic().unwrap();
        assert!(b.rho().as_monomial().unwrap().is_one());
        assert!(ElementaryConnection::is_isomorphic_elementary(&a, &b).unwrap().is_some());
    }

    #[test]
    fn canonical_merging() {
        let e = el(1, &[(-1, q(1, 1))], RegularPart::trivial(1));
        let m = FormalConnection::new(vec![e.clone(), e.clone()]).canonicalize().unwrap();
        assert_eq!(m.summands.len(), 1);
        assert_eq!(m.summands[0].reg(), &RegularPart::trivial(2));

        let r1 = RegularPart::from_pairs([(q(2, 1), 1)]).unwrap();
        let r2 = RegularPart::from_pairs([(q(3, 1), 2)]).unwrap();
        let a = el(2, &[(-1, q(1, 1))], r1.clone());
        let b = el(2, &[(-1, q(-1, 1))], r2.clone());
        let m = FormalConnection::new(vec![a, b]).canonicalize().unwrap();
        assert_eq!(m.summands.len(), 1);
        assert_eq!(m.summands[0].reg(), &r1.direct_sum(&r2));

        let again = m.canonicalize().unwrap();
        assert_eq!(again.to_string(), m.to_string());
    }

    #[test]
    fn display_forms() {
        let a = ElementaryConnection::monomial(q(-1, 1), 2, &phi(&[(-1, q(2, 1))]), RegularPart::from_pairs([(q(-1, 1), 1)]).unwrap())
            .unwrap();
        assert_eq!(a.to_string(), "El(rho=-1/1*u^2, phi=2/1*u^-1, R=[(-1:1)])");
        assert_eq!(ElementaryConnection::regular(RegularPart::trivial(2)).to_string(), "Reg(R=[(1:1), (1:1)])");
    }
}

#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;

    fn coeff() -> impl Strategy<Value = FieldElement> {
        (prop_oneof![-4i64..0, 1i64..5], 1i64..3, 0i64..4)
            .prop_map(|(a, b, k)| FieldElement::from_ratio(a, b) * FieldElement::zeta_pow(4, k))
    }

    fn elementary() -> impl Strategy<Value = ElementaryConnection> {
        (1usize..5, prop::collection::vec((1i64..6, coeff()), 1..3), 1usize..3).prop_map(|(p, ts, r)| {
            let phi = LaurentSeries::from_terms(VAR, ts.into_iter().map(|(k, c)| (-k, c)), Precision::Exact);
            ElementaryConnection::monomial(FieldElement::one(), p, &phi, RegularPart::trivial(r)).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn rotations_are_isomorphic(e in elementary(), j in 0i64..4) {
            let z = FieldElement::zeta_pow(e.p() as u64, j);
            let rotated = e.rotate(&z).unwrap();
            prop_assert!(ElementaryConnection::is_isomorphic_elementary(&e, &rotated).unwrap().is_some());
        }

        #[test]
        fn canonicalize_idempotent(a in elementary(), b in elementary()) {
            let m = FormalConnection::new(vec![a, b]);
            let c = m.canonicalize().unwrap();
            prop_assert_eq!(c.rank(), m.rank());
            prop_assert_eq!(c.irregularity(), m.irregularity());
            prop_assert_eq!(c.canonicalize().unwrap().to_string(), c.to_string());
            prop_assert!(FormalConnection::is_isomorphic(&m, &c).unwrap());
        }

        #[test]
        fn reduction_preserves_invariants(e in elementary()) {
            let m = e.reduce_minimal().unwrap();
            prop_assert_eq!(m.invariants(), e.invariants());
            prop_assert!(m.is_minimal());
        }

        #[test]
        fn pullback_scales_irregularity(e in elementary()) {
            let p = e.p();
            for d in (1..=p).filter(|d| p % d == 0) {
                let m = e.pullback_decompose(d).unwrap();
                prop_assert_eq!(m.rank(), e.rank());
                prop_assert_eq!(m.irregularity(), d * e.irregularity());
            }
        }
    }
}
