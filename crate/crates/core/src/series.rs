//! Truncated formal Laurent series with explicit precision tracking.
//!
//! A series `f` with finite precision `P` is known modulo `u^P`: all stored
//! exponents are below `P` and nothing is claimed about higher terms. An
//! `Exact` series is a Laurent polynomial known completely.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::atomic::{AtomicI64, Ordering as AtomicOrdering};

use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::exactfield::{FieldElement, FieldError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Precision {
    Exact,
    Finite(i64),
}

impl Precision {
    pub fn min(self, other: Precision) -> Precision {
        match (self, other) {
            (Precision::Exact, p) | (p, Precision::Exact) => p,
            (Precision::Finite(a), Precision::Finite(b)) => Precision::Finite(a.min(b)),
        }
    }

    pub fn shift(self, k: i64) -> Precision {
        match self {
            Precision::Exact => Precision::Exact,
            Precision::Finite(p) => Precision::Finite(p + k),
        }
    }

    pub fn is_exact(self) -> bool {
        self == Precision::Exact
    }

    /// Whether the exponent `k` is known.
    pub fn covers(self, k: i64) -> bool {
        match self {
            Precision::Exact => true,
            Precision::Finite(p) => k < p,
        }
    }
}

impl PartialOrd for Precision {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Precision {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Precision::Exact, Precision::Exact) => Ordering::Equal,
            (Precision::Exact, _) => Ordering::Greater,
            (_, Precision::Exact) => Ordering::Less,
            (Precision::Finite(a), Precision::Finite(b)) => a.cmp(b),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("division by a zero series")]
    DivisionByZero,
    #[error("result has no known terms")]
    PrecisionUnderflow,
    #[error("insufficient precision: need terms below u^{needed}, have {have:?}")]
    InsufficientPrecision { needed: i64, have: Precision },
    #[error("substituted series must have positive valuation, got {0:?}")]
    InvalidComposition(Option<i64>),
    #[error("reversion needs valuation 1, got {0:?}")]
    ReversionValuation(Option<i64>),
    #[error("valuation {valuation} is not divisible by {m}")]
    RootValuation { valuation: i64, m: usize },
    #[error("cannot take a root of a series that is zero up to precision")]
    RootOfZero,
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Tri-state zero test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZeroStatus {
    NonZero,
    ZeroUpToPrecision,
    ExactZero,
}

static WINDOW_OVERRIDE: AtomicI64 = AtomicI64::new(0);

/// Working window for infinite expansions: `max(2(p+q)+8, 16)` terms.
pub fn default_window(p: i64, q: i64) -> i64 {
    (2 * (p + q) + 8).max(16)
}

/// The window actually used: the override if one is set, else the default.
pub fn working_window(p: i64, q: i64) -> i64 {
    match WINDOW_OVERRIDE.load(AtomicOrdering::Relaxed) {
        0 => default_window(p, q),
        w => w,
    }
}

/// Overrides the working window process-wide (`None` restores the default).
pub fn set_window_override(window: Option<i64>) {
    WINDOW_OVERRIDE.store(window.unwrap_or(0).max(0), AtomicOrdering::Relaxed);
}

#[derive(Clone)]
pub struct LaurentSeries {
    var: String,
    terms: BTreeMap<i64, FieldElement>,
    precision: Precision,
}

impl LaurentSeries {
    pub fn zero(var: &str) -> Self {
        LaurentSeries { var: var.to_string(), terms: BTreeMap::new(), precision: Precision::Exact }
    }

    /// `O(u^p)`.
    pub fn big_o(var: &str, p: i64) -> Self {
        LaurentSeries { var: var.to_string(), terms: BTreeMap::new(), precision: Precision::Finite(p) }
    }

    pub fn monomial(var: &str, c: FieldElement, k: i64) -> Self {
        Self::from_terms(var, [(k, c)], Precision::Exact)
    }

    pub fn constant(var: &str, c: FieldElement) -> Self {
        Self::monomial(var, c, 0)
    }

    /// The variable itself.
    pub fn variable(var: &str) -> Self {
        Self::monomial(var, FieldElement::one(), 1)
    }

    pub fn from_terms(
        var: &str,
        terms: impl IntoIterator<Item = (i64, FieldElement)>,
        precision: Precision,
    ) -> Self {
        let mut map: BTreeMap<i64, FieldElement> = BTreeMap::new();
        for (k, c) in terms {
            if !precision.covers(k) {
                continue;
            }
            match map.remove(&k) {
                Some(old) => {
                    let s = old + c;
                    if !s.is_zero() {
                        map.insert(k, s);
                    }
                }
                None => {
                    if !c.is_zero() {
                        map.insert(k, c);
                    }
                }
            }
        }
        LaurentSeries { var: var.to_string(), terms: map, precision }
    }

    pub fn var(&self) -> &str {
        &self.var
    }

    pub fn with_var(&self, var: &str) -> Self {
        LaurentSeries { var: var.to_string(), ..self.clone() }
    }

    pub fn precision(&self) -> Precision {
        self.precision
    }

    pub fn is_exact(&self) -> bool {
        self.precision.is_exact()
    }

    /// Lowest exponent with a nonzero coefficient; `None` when no term is known.
    pub fn valuation(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    /// Valuation, or the precision for a series that is zero up to precision.
    fn effective_valuation(&self) -> Option<i64> {
        match (self.valuation(), self.precision) {
            (Some(v), _) => Some(v),
            (None, Precision::Finite(p)) => Some(p),
            (None, Precision::Exact) => None,
        }
    }

    pub fn leading_coefficient(&self) -> Option<&FieldElement> {
        self.terms.values().next()
    }

    /// Largest stored exponent.
    pub fn degree(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn coeff(&self, k: i64) -> FieldElement {
        self.terms.get(&k).cloned().unwrap_or_else(FieldElement::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &FieldElement)> {
        self.terms.iter().map(|(k, c)| (*k, c))
    }

    pub fn zero_status(&self) -> ZeroStatus {
        if !self.terms.is_empty() {
            ZeroStatus::NonZero
        } else if self.is_exact() {
            ZeroStatus::ExactZero
        } else {
            ZeroStatus::ZeroUpToPrecision
        }
    }

    pub fn is_exact_zero(&self) -> bool {
        self.zero_status() == ZeroStatus::ExactZero
    }

    /// Whether `self` is `c u^k` exactly.
    pub fn as_monomial(&self) -> Option<(FieldElement, i64)> {
        if self.is_exact() && self.terms.len() == 1 {
            let (k, c) = self.terms.iter().next().unwrap();
            Some((c.clone(), *k))
        } else {
            None
        }
    }

    pub fn truncate(&self, p: i64) -> Self {
        let precision = self.precision.min(Precision::Finite(p));
        Self::from_terms(&self.var, self.terms.clone(), precision)
    }

    /// Forget that the series is exact: keep only terms below `p`.
    pub fn with_precision(&self, p: Precision) -> Self {
        Self::from_terms(&self.var, self.terms.clone(), self.precision.min(p))
    }

    pub fn map_coeffs(&self, f: impl Fn(&FieldElement) -> FieldElement) -> Self {
        Self::from_terms(&self.var, self.terms.iter().map(|(k, c)| (*k, f(c))), self.precision)
    }

    pub fn scale(&self, c: &FieldElement) -> Self {
        if c.is_zero() {
            return Self::zero(&self.var);
        }
        self.map_coeffs(|x| x * c)
    }

    /// Multiplication by `u^k`.
    pub fn shift(&self, k: i64) -> Self {
        Self::from_terms(&self.var, self.terms.iter().map(|(e, c)| (e + k, c.clone())), self.precision.shift(k))
    }

    pub fn add(&self, other: &Self) -> Self {
        let precision = self.precision.min(other.precision);
        Self::from_terms(
            &self.var,
            self.terms.iter().chain(other.terms.iter()).map(|(k, c)| (*k, c.clone())),
            precision,
        )
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|c| -c)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_exact_zero() || other.is_exact_zero() {
            return Self::zero(&self.var);
        }
        let precision = match (self.precision, other.precision) {
            (Precision::Exact, Precision::Exact) => Precision::Exact,
            _ => {
                let vf = self.effective_valuation().unwrap();
                let vg = other.effective_valuation().unwrap();
                self.precision.shift(vg).min(other.precision.shift(vf))
            }
        };
        let mut out: BTreeMap<i64, FieldElement> = BTreeMap::new();
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                let k = a + b;
                if !precision.covers(k) {
                    continue;
                }
                let prod = x * y;
                match out.get_mut(&k) {
                    Some(acc) => *acc = &*acc + &prod,
                    None => {
                        out.insert(k, prod);
                    }
                }
            }
        }
        Self::from_terms(&self.var, out, precision)
    }

    /// Multiplicative inverse. Exact monomials invert exactly; anything else
    /// is expanded to `window` terms past the valuation (or less, if the
    /// input precision does not support that many).
    pub fn inverse(&self, window: i64) -> Result<Self, SeriesError> {
        let v = self.valuation().ok_or(SeriesError::DivisionByZero)?;
        let c = self.leading_coefficient().unwrap().clone();
        let cinv = c.inverse()?;
        if let Some((_, k)) = self.as_monomial() {
            return Ok(Self::monomial(&self.var, cinv, -k));
        }
        // self = c u^v (1 + h), relative precision r
        let rel = match self.precision {
            Precision::Exact => window,
            Precision::Finite(p) => (p - v).min(window.max(1)),
        };
        let n = rel.max(0) as usize;
        let a: Vec<FieldElement> = (0..n).map(|i| &self.coeff(v + i as i64) * &cinv).collect();
        let mut b: Vec<FieldElement> = Vec::with_capacity(n);
        for i in 0..n {
            if i == 0 {
                b.push(FieldElement::one());
                continue;
            }
            let mut s = FieldElement::zero();
            for j in 1..=i {
                if !a[j].is_zero() && !b[i - j].is_zero() {
                    s = s + &a[j] * &b[i - j];
                }
            }
            b.push(-s);
        }
        let precision = Precision::Finite(-v + rel);
        Ok(Self::from_terms(
            &self.var,
            b.into_iter().enumerate().map(|(i, x)| (i as i64 - v, x * &cinv)),
            precision,
        ))
    }

    /// `self / other`. Exact when the division of Laurent polynomials has no
    /// remainder, otherwise expanded to the working window.
    pub fn div(&self, other: &Self, window: i64) -> Result<Self, SeriesError> {
        if other.valuation().is_none() {
            return Err(SeriesError::DivisionByZero);
        }
        if self.is_exact() && other.is_exact() {
            if let Some(q) = self.exact_quotient(other)? {
                return Ok(q);
            }
        }
        let inv = other.inverse(window)?;
        Ok(self.mul(&inv))
    }

    fn exact_quotient(&self, other: &Self) -> Result<Option<Self>, SeriesError> {
        if self.is_exact_zero() {
            return Ok(Some(Self::zero(&self.var)));
        }
        let (dv, dd) = (other.valuation().unwrap(), other.degree().unwrap());
        let lead = other.terms[&dd].inverse()?;
        let mut rem = self.terms.clone();
        let mut quot = Vec::new();
        while let Some((&k, c)) = rem.iter().next_back() {
            let nv = *rem.keys().next().unwrap();
            if k - dd < nv - dv {
                return Ok(None);
            }
            let qc = c * &lead;
            let e = k - dd;
            for (j, y) in &other.terms {
                let t = &qc * y;
                let key = j + e;
                let nv = match rem.get(&key) {
                    Some(x) => x - &t,
                    None => -t,
                };
                if nv.is_zero() {
                    rem.remove(&key);
                } else {
                    rem.insert(key, nv);
                }
            }
            quot.push((e, qc));
        }
        Ok(Some(Self::from_terms(&self.var, quot, Precision::Exact)))
    }

    pub fn pow(&self, k: i64, window: i64) -> Result<Self, SeriesError> {
        let base = if k < 0 { self.inverse(window)? } else { self.clone() };
        let mut acc = Self::constant(&self.var, FieldElement::one());
        for _ in 0..k.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Ok(acc)
    }

    pub fn derivative(&self) -> Self {
        Self::from_terms(
            &self.var,
            self.terms.iter().map(|(k, c)| (k - 1, c * &FieldElement::from_int(*k))),
            self.precision.shift(-1),
        )
    }

    /// `self(g)`; `g` must have positive valuation.
    pub fn compose(&self, g: &Self, window: i64) -> Result<Self, SeriesError> {
        let vg = match g.valuation() {
            Some(v) if v >= 1 => v,
            other => return Err(SeriesError::InvalidComposition(other)),
        };
        let mut precision = match self.precision {
            Precision::Exact => Precision::Exact,
            Precision::Finite(p) => Precision::Finite(p.saturating_mul(vg)),
        };
        let Some(vf) = self.valuation() else {
            return Ok(LaurentSeries { var: g.var.clone(), terms: BTreeMap::new(), precision });
        };
        let top = self.degree().unwrap();
        // bound every term by the precision the result can possibly have
        let mut acc = Self::zero(&g.var);
        let ginv = if vf < 0 { Some(g.inverse(window)?) } else { None };
        let mut neg_pow = Self::constant(&g.var, FieldElement::one());
        for k in (vf..0).rev() {
            neg_pow = neg_pow.mul(ginv.as_ref().unwrap());
            if let Some(c) = self.terms.get(&k) {
                acc = acc.add(&neg_pow.scale(c));
            }
        }
        let mut pos_pow = Self::constant(&g.var, FieldElement::one());
        for k in 0..=top.max(-1) {
            if k > 0 {
                pos_pow = pos_pow.mul(g);
                if let Precision::Finite(p) = precision.min(acc.precision) {
                    pos_pow = pos_pow.truncate(p);
                    if pos_pow.valuation().is_none() && k * vg >= p {
                        break;
                    }
                }
            }
            if let Some(c) = self.terms.get(&k) {
                acc = acc.add(&pos_pow.scale(c));
            }
        }
        precision = precision.min(acc.precision);
        Ok(acc.with_precision(precision))
    }

    /// Compositional inverse of a series with valuation one.
    pub fn reversion(&self, window: i64) -> Result<Self, SeriesError> {
        if self.valuation() != Some(1) {
            return Err(SeriesError::ReversionValuation(self.valuation()));
        }
        if let Some((c, _)) = self.as_monomial() {
            return Ok(Self::monomial(&self.var, c.inverse()?, 1));
        }
        let n = match self.precision {
            Precision::Exact => window,
            Precision::Finite(p) => (p - 1).min(window.max(1)),
        };
        // Lagrange inversion: b_k = (1/k) [u^{k-1}] (u/f)^k
        let h = self.shift(-1);
        let hinv = h.inverse(n.max(1))?.truncate(n);
        let mut terms = Vec::new();
        let mut power = Self::constant(&self.var, FieldElement::one());
        for k in 1..=n {
            power = power.mul(&hinv).truncate(n);
            let c = power.coeff(k - 1);
            if !c.is_zero() {
                terms.push((k, c * FieldElement::from_ratio(1, k)));
            }
        }
        Ok(Self::from_terms(&self.var, terms, Precision::Finite(n + 1)))
    }

    /// An `m`-th root whose leading coefficient follows the canonical branch.
    pub fn nth_root(&self, m: usize, window: i64) -> Result<Self, SeriesError> {
        let v = self.valuation().ok_or(SeriesError::RootOfZero)?;
        if v.rem_euclid(m as i64) != 0 {
            return Err(SeriesError::RootValuation { valuation: v, m });
        }
        let c = self.leading_coefficient().unwrap().clone();
        let root_c = c.adjoin_root(m)?;
        if let Some((_, k)) = self.as_monomial() {
            return Ok(Self::monomial(&self.var, root_c, k / m as i64));
        }
        let rel = match self.precision {
            Precision::Exact => window,
            Precision::Finite(p) => (p - v).min(window.max(1)),
        };
        let cinv = c.inverse()?;
        let n = rel.max(0) as usize;
        let a: Vec<FieldElement> = (0..n).map(|i| &self.coeff(v + i as i64) * &cinv).collect();
        // Miller's recurrence for (1 + h)^alpha
        let alpha = BigRational::new(1.into(), (m as i64).into());
        let mut y: Vec<FieldElement> = Vec::with_capacity(n);
        for i in 0..n {
            if i == 0 {
                y.push(FieldElement::one());
                continue;
            }
            let mut s = FieldElement::zero();
            for k in 1..=i {
                if a[k].is_zero() {
                    continue;
                }
                let w = (&alpha + BigRational::one()) * BigRational::from_integer((k as i64).into())
                    - BigRational::from_integer((i as i64).into());
                if w.is_zero() {
                    continue;
                }
                s = s + (&a[k] * &y[i - k]).scale(&w);
            }
            y.push(s.scale(&BigRational::new(1.into(), (i as i64).into())));
        }
        let base = v / m as i64;
        Ok(Self::from_terms(
            &self.var,
            y.into_iter().enumerate().map(|(i, x)| (base + i as i64, x * &root_c)),
            Precision::Finite(base + rel),
        ))
    }

    /// The strictly negative part, certified exact.
    pub fn principal_part(&self) -> Result<Self, SeriesError> {
        if let Precision::Finite(p) = self.precision {
            if p < 0 {
                return Err(SeriesError::InsufficientPrecision { needed: 0, have: self.precision });
            }
        }
        Ok(Self::from_terms(
            &self.var,
            self.terms.range(..0).map(|(k, c)| (*k, c.clone())),
            Precision::Exact,
        ))
    }

    /// `f(c u^k)` for an exact monomial substitution with `k >= 1`.
    pub fn substitute_monomial(&self, c: &FieldElement, k: i64, var: &str) -> Result<Self, SeriesError> {
        let g = Self::monomial(var, c.clone(), k);
        self.compose(&g, 1)
    }

    /// Equality of known data: same precision and same coefficients.
    pub fn same_as(&self, other: &Self) -> bool {
        self.precision == other.precision && self.terms == other.terms
    }

    /// Agreement on all exponents known to both.
    pub fn agrees_with(&self, other: &Self) -> bool {
        let p = self.precision.min(other.precision);
        self.sub(other).with_precision(p).valuation().is_none()
    }

    /// Total order on exact series (used for canonical sorting): by exponent
    /// from the most negative, then by coefficient.
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        let mut a = self.terms.iter();
        let mut b = other.terms.iter();
        loop {
            match (a.next(), b.next()) {
                (None, None) => return self.precision.cmp(&other.precision),
                (None, Some(_)) => return Ordering::Less,
                (Some(_), None) => return Ordering::Greater,
                (Some((ka, ca)), Some((kb, cb))) => {
                    let o = ka.cmp(kb).then_with(|| ca.canonical_cmp(cb));
                    if o != Ordering::Equal {
                        return o;
                    }
                }
            }
        }
    }
}

impl PartialEq for LaurentSeries {
    fn eq(&self, other: &Self) -> bool {
        self.same_as(other)
    }
}

impl fmt::Debug for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentSeries({self})")
    }
}

impl fmt::Display for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in &self.terms {
            let text = c.to_string();
            let single = c.term_count() == 1;
            let (neg, body) = match text.strip_prefix('-') {
                Some(rest) if single => (true, rest.to_string()),
                _ if single => (false, text),
                _ => (false, format!("({text})")),
            };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            first = false;
            if *k == 0 {
                write!(f, "{body}")?;
            } else {
                write!(f, "{body}*{}^{k}", self.var)?;
            }
        }
        match self.precision {
            Precision::Exact if first => write!(f, "0"),
            Precision::Exact => Ok(()),
            Precision::Finite(p) if first => write!(f, "O({}^{p})", self.var),
            Precision::Finite(p) => write!(f, " + O({}^{p})", self.var),
        }
    }
}
