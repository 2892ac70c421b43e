//! Exact scalars: elements of a cyclotomic field `Q(zeta_N)`, optionally
//! extended by a short linear tower of radicals `x_k^{m_k} = gamma_k`.
//!
//! An element is stored as a dense rational coefficient vector over the
//! power basis `zeta^i * x_1^{e_1} * ... * x_L^{e_L}` with `i < phi(N)` and
//! `e_k < m_k`. Elements living in different towers are brought into a
//! common tower on demand (cyclotomic orders are lifted to their lcm, and
//! radicals are re-adjoined, reusing existing generators whenever the
//! radicand already has a root in the target).

use std::cmp::Ordering;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub type Rational = BigRational;

/// Maximum number of radicals in one tower.
pub const MAX_TOWER_DEPTH: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot take a root of zero")]
    RootOfZero,
    #[error("radical tower would have depth {0}, the cap is {MAX_TOWER_DEPTH}")]
    DepthExceeded(usize),
    #[error("x^{degree} - ({radicand}) is reducible over the current field")]
    Reducible { degree: usize, radicand: String },
}

#[derive(Debug, Clone)]
struct Radical {
    degree: usize,
    /// Lives in the tower made of the radicals below this one.
    radicand: FieldElement,
    /// Principal complex value, display and ordering only.
    value: Complex64,
}

#[derive(Debug)]
pub struct Tower {
    order: u64,
    base_degree: usize,
    /// `x^n mod Phi_order` for `0 <= n < order`.
    powers: Arc<Vec<Vec<Rational>>>,
    radicals: Vec<Radical>,
    /// `dims[k]` is the dimension over Q once `k` radicals are adjoined.
    dims: Vec<usize>,
}

impl Tower {
    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn depth(&self) -> usize {
        self.radicals.len()
    }

    fn dim(&self) -> usize {
        *self.dims.last().unwrap()
    }

    fn same_as(&self, other: &Tower) -> bool {
        self.order == other.order
            && self.radicals.len() == other.radicals.len()
            && self
                .radicals
                .iter()
                .zip(&other.radicals)
                .all(|(a, b)| a.degree == b.degree && a.radicand.coeffs == b.radicand.coeffs)
    }

    fn mul_level(&self, level: usize, a: &[Rational], b: &[Rational]) -> Vec<Rational> {
        if level == 0 {
            return self.mul_base(a, b);
        }
        let rad = &self.radicals[level - 1];
        let m = rad.degree;
        let sub = self.dims[level - 1];
        let mut out = vec![Rational::zero(); m * sub];
        for i in 0..m {
            let ai = &a[i * sub..(i + 1) * sub];
            if is_zero_slice(ai) {
                continue;
            }
            for j in 0..m {
                let bj = &b[j * sub..(j + 1) * sub];
                if is_zero_slice(bj) {
                    continue;
                }
                let mut prod = self.mul_level(level - 1, ai, bj);
                let mut k = i + j;
                if k >= m {
                    k -= m;
                    prod = self.mul_level(level - 1, &prod, &rad.radicand.coeffs);
                }
                for (o, p) in out[k * sub..(k + 1) * sub].iter_mut().zip(prod) {
                    *o += p;
                }
            }
        }
        out
    }

    fn mul_base(&self, a: &[Rational], b: &[Rational]) -> Vec<Rational> {
        let d = self.base_degree;
        if d == 1 {
            return vec![&a[0] * &b[0]];
        }
        let n = self.order as usize;
        let mut conv = vec![Rational::zero(); 2 * d - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                conv[i + j] += x * y;
            }
        }
        let mut out: Vec<Rational> = conv[..d].to_vec();
        for (e, c) in conv.iter().enumerate().skip(d) {
            if c.is_zero() {
                continue;
            }
            for (o, r) in out.iter_mut().zip(&self.powers[e % n]) {
                if !r.is_zero() {
                    *o += c * r;
                }
            }
        }
        out
    }

    fn zeta_power(&self, k: i64) -> Vec<Rational> {
        let n = self.order as i64;
        let mut v = self.powers[k.rem_euclid(n) as usize].clone();
        v.resize(self.dim(), Rational::zero());
        v
    }
}

fn is_zero_slice(v: &[Rational]) -> bool {
    v.iter().all(Zero::is_zero)
}

fn divisors(n: u64) -> Vec<u64> {
    (1..=n).filter(|d| n % d == 0).collect()
}

/// Integer coefficients of the `n`-th cyclotomic polynomial, lowest degree first.
fn cyclotomic_poly(n: u64) -> Vec<BigInt> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Vec<BigInt>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(p) = cache.lock().unwrap().get(&n) {
        return p.clone();
    }
    // x^n - 1 divided by Phi_d for every proper divisor d.
    let mut num = vec![BigInt::zero(); n as usize + 1];
    num[0] = BigInt::from(-1);
    num[n as usize] = BigInt::one();
    for d in divisors(n) {
        if d == n {
            continue;
        }
        let den = cyclotomic_poly(d);
        num = poly_exact_div(&num, &den);
    }
    cache.lock().unwrap().insert(n, num.clone());
    num
}

fn poly_exact_div(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let nd = rem.len() - 1;
    let mut quot = vec![BigInt::zero(); nd - dd + 1];
    for k in (0..=nd - dd).rev() {
        let c = rem[k + dd].clone() / &den[dd];
        for (j, dj) in den.iter().enumerate() {
            rem[k + j] -= &c * dj;
        }
        quot[k] = c;
    }
    quot
}

fn base_tower(order: u64) -> Arc<Tower> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Tower>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(t) = cache.lock().unwrap().get(&order) {
        return t.clone();
    }
    let phi = cyclotomic_poly(order);
    let d = phi.len() - 1;
    let mut powers = Vec::with_capacity(order as usize);
    let mut cur = vec![Rational::zero(); d];
    cur[0] = Rational::one();
    for _ in 0..order {
        powers.push(cur.clone());
        // multiply by x and reduce by the monic Phi
        let top = cur[d - 1].clone();
        let mut next = vec![Rational::zero(); d];
        for i in (1..d).rev() {
            next[i] = cur[i - 1].clone();
        }
        if !top.is_zero() {
            for i in 0..d {
                next[i] -= &top * Rational::from_integer(phi[i].clone());
            }
        }
        cur = next;
    }
    let tower = Arc::new(Tower {
        order,
        base_degree: d,
        powers: Arc::new(powers),
        radicals: Vec::new(),
        dims: vec![d],
    });
    cache.lock().unwrap().insert(order, tower.clone());
    tower
}

/// An exact scalar.
#[derive(Clone)]
pub struct FieldElement {
    tower: Arc<Tower>,
    coeffs: Vec<Rational>,
}

impl FieldElement {
    pub fn rational(q: Rational) -> Self {
        FieldElement { tower: base_tower(1), coeffs: vec![q] }
    }

    pub fn from_int(n: i64) -> Self {
        Self::rational(Rational::from_integer(n.into()))
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        Self::rational(Rational::new(n.into(), d.into()))
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    /// The primitive root `exp(2 pi i / n)`.
    pub fn zeta(n: u64) -> Self {
        Self::zeta_pow(n, 1)
    }

    /// `exp(2 pi i k / n)`.
    /// `exp(2 pi i r)` for rational `r`, as a power of a primitive root of unity.
    pub fn exp_two_pi_i(r: &Rational) -> Self {
        let den = r.denom().to_u64().expect("denominator fits in u64");
        let num = r.numer().mod_floor(r.denom()).to_i64().unwrap();
        Self::zeta_pow(den, num).simplify()
    }

    pub fn zeta_pow(n: u64, k: i64) -> Self {
        assert!(n >= 1, "cyclotomic order must be positive");
        let t = base_tower(n);
        let coeffs = t.zeta_power(k);
        FieldElement { tower: t, coeffs }
    }

    pub fn tower(&self) -> &Arc<Tower> {
        &self.tower
    }

    /// Cyclotomic order of the ambient field.
    pub fn order(&self) -> u64 {
        self.tower.order
    }

    pub fn is_zero(&self) -> bool {
        is_zero_slice(&self.coeffs)
    }

    pub fn is_one(&self) -> bool {
        self.to_rational().is_some_and(|q| q.is_one())
    }

    pub fn to_rational(&self) -> Option<Rational> {
        if is_zero_slice(&self.coeffs[1..]) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    pub fn is_rational(&self) -> bool {
        self.to_rational().is_some()
    }

    fn with_coeffs(&self, coeffs: Vec<Rational>) -> Self {
        FieldElement { tower: self.tower.clone(), coeffs }
    }

    fn constant_in(tower: &Arc<Tower>, q: Rational) -> Self {
        let mut coeffs = vec![Rational::zero(); tower.dim()];
        coeffs[0] = q;
        FieldElement { tower: tower.clone(), coeffs }
    }

    /// Re-express this element in `target`, which must extend this tower.
    pub fn lift_to(&self, target: &Arc<Tower>) -> Result<FieldElement, FieldError> {
        let (a, _) = coerce_pair(self, &FieldElement::constant_in(target, Rational::zero()))?;
        Ok(a)
    }

    /// Re-express both elements in `Q(zeta_lcm)` (plus their radicals).
    pub fn lift_to_common_field(
        x: &FieldElement,
        y: &FieldElement,
    ) -> Result<(FieldElement, FieldElement, u64), FieldError> {
        let (a, b) = coerce_pair(x, y)?;
        let n = a.order();
        Ok((a, b, n))
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, FieldError> {
        let (a, b) = coerce_pair(self, other)?;
        let coeffs = a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + y).collect();
        Ok(a.with_coeffs(coeffs))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, FieldError> {
        let (a, b) = coerce_pair(self, other)?;
        let coeffs = a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x - y).collect();
        Ok(a.with_coeffs(coeffs))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, FieldError> {
        if let Some(q) = other.to_rational() {
            return Ok(self.scale(&q));
        }
        if let Some(q) = self.to_rational() {
            return Ok(other.scale(&q));
        }
        let (a, b) = coerce_pair(self, other)?;
        let depth = a.tower.depth();
        let coeffs = a.tower.mul_level(depth, &a.coeffs, &b.coeffs);
        Ok(a.with_coeffs(coeffs))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, FieldError> {
        if let Some(q) = other.to_rational() {
            if q.is_zero() {
                return Err(FieldError::DivisionByZero);
            }
            return Ok(self.scale(&q.recip()));
        }
        self.checked_mul(&other.inverse()?)
    }

    pub fn scale(&self, q: &Rational) -> Self {
        self.with_coeffs(self.coeffs.iter().map(|c| c * q).collect())
    }

    pub fn inverse(&self) -> Result<Self, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        if let Some(q) = self.to_rational() {
            return Ok(self.with_coeffs({
                let mut v = vec![Rational::zero(); self.coeffs.len()];
                v[0] = q.recip();
                v
            }));
        }
        let n = self.coeffs.len();
        let depth = self.tower.depth();
        // columns of the multiplication-by-self matrix
        let mut cols = Vec::with_capacity(n);
        for j in 0..n {
            let mut e = vec![Rational::zero(); n];
            e[j] = Rational::one();
            cols.push(self.tower.mul_level(depth, &self.coeffs, &e));
        }
        let mut target = vec![Rational::zero(); n];
        target[0] = Rational::one();
        match solve_linear(&cols, &target) {
            Some(x) => Ok(self.with_coeffs(x)),
            None => Err(FieldError::Reducible {
                degree: self.tower.radicals.last().map_or(0, |r| r.degree),
                radicand: self
                    .tower
                    .radicals
                    .last()
                    .map_or_else(String::new, |r| r.radicand.to_string()),
            }),
        }
    }

    pub fn pow(&self, e: i64) -> Result<Self, FieldError> {
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut k = e.unsigned_abs();
        let mut acc = FieldElement::constant_in(&self.tower, Rational::one());
        let mut b = base;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &b;
            }
            k >>= 1;
            if k > 0 {
                b = &b * &b;
            }
        }
        Ok(acc)
    }

    /// Numerical value, used for display approximations and deterministic ordering.
    pub fn approx(&self) -> Complex64 {
        approx_level(&self.tower, self.tower.depth(), &self.coeffs)
    }

    /// A total order compatible with equality: approximate complex value
    /// (real part, then imaginary part), ties broken on the printed form.
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        let a = self.approx();
        let b = other.approx();
        let tol = 1e-9 * (1.0 + a.norm().max(b.norm()));
        if (a.re - b.re).abs() > tol {
            return a.re.partial_cmp(&b.re).unwrap_or(Ordering::Equal);
        }
        if (a.im - b.im).abs() > tol {
            return a.im.partial_cmp(&b.im).unwrap_or(Ordering::Equal);
        }
        if self == other {
            Ordering::Equal
        } else {
            self.to_string().cmp(&other.to_string())
        }
    }

    /// The same value in the smallest cyclotomic field containing it
    /// (elements with radicals are returned unchanged).
    pub fn simplify(&self) -> Self {
        if self.tower.depth() > 0 || self.tower.order == 1 {
            return self.clone();
        }
        if let Some(q) = self.to_rational() {
            return FieldElement::rational(q);
        }
        let n = self.tower.order;
        for d in divisors(n) {
            if d == n {
                break;
            }
            let small = base_tower(d);
            let cols: Vec<Vec<Rational>> = (0..small.base_degree)
                .map(|i| self.tower.zeta_power((i as u64 * (n / d)) as i64))
                .collect();
            if let Some(x) = solve_linear(&cols, &self.coeffs) {
                return FieldElement { tower: small, coeffs: x };
            }
        }
        self.clone()
    }

    /// If this element equals `r * zeta_M^j` with `r > 0` rational, returns
    /// `(r, M, j)`. Only elements without radical components qualify.
    fn as_scaled_root_of_unity(&self) -> Option<(Rational, u64, u64)> {
        let d = self.tower.base_degree;
        if !is_zero_slice(&self.coeffs[d..]) {
            return None;
        }
        let n = self.tower.order;
        let base = FieldElement {
            tower: base_tower(n),
            coeffs: self.coeffs[..d].to_vec(),
        };
        let mut negative = None;
        for k in 0..n {
            let rotated = &base * &FieldElement::zeta_pow(n, -(k as i64));
            if let Some(c) = rotated.to_rational() {
                if c.is_positive() {
                    return Some((c, n, k));
                }
                if negative.is_none() && c.is_negative() {
                    let m = n.lcm(&2);
                    let j = (k * (m / n) + m / 2) % m;
                    negative = Some((-c, m, j));
                }
            }
        }
        negative
    }

    /// An `m`-th root of `self`, enlarging the field only when necessary.
    ///
    /// Branch rule: the root of `zeta_N^k` is `zeta_{mN}^k`, the root of a
    /// positive rational is its positive real root. When no root exists in
    /// the current field a new radical generator is adjoined.
    pub fn adjoin_root(&self, m: usize) -> Result<FieldElement, FieldError> {
        if self.is_zero() {
            return Err(FieldError::RootOfZero);
        }
        if m == 1 {
            return Ok(self.clone());
        }
        if let Some(root) = self.find_root(m)? {
            return Ok(root);
        }
        if let Some((r, big_m, j)) = self.as_scaled_root_of_unity() {
            // positive rational part needs a fresh radical
            let mut e = m;
            let s = loop {
                if m % e == 0 {
                    if let Some(s) = rational_nth_root(&r, e) {
                        break s;
                    }
                }
                e -= 1;
            };
            let m2 = m / e;
            let z = zeta_reduced(m as u64 * big_m, j)
                .checked_add(&FieldElement::constant_in(&self.tower, Rational::zero()))?;
            if m2 % 2 == 0 && sqrt_in_cyclotomic(&s, z.tower.order) {
                let t = rational_sqrt_cyclotomic(&s);
                let y = if m2 == 2 { t } else { t.adjoin_root(m2 / 2)? };
                return y.checked_mul(&z);
            }
            let x = extend_tower(&z.tower, m2, FieldElement::constant_in(&z.tower, s))?;
            return x.checked_mul(&z);
        }
        extend_tower(&self.tower, m, self.clone())
    }

    /// Searches for `c * zeta * monomial` with `c` rational whose `m`-th power is `self`.
    fn find_root(&self, m: usize) -> Result<Option<FieldElement>, FieldError> {
        let tower = self.tower.clone();
        let degrees: Vec<usize> = tower.radicals.iter().map(|r| r.degree).collect();
        let mut exps = vec![0usize; degrees.len()];
        loop {
            let mono = monomial_in(&tower, &exps);
            let w = self.checked_div(&mono.pow(m as i64)?)?;
            if let Some((r, big_m, j)) = w.as_scaled_root_of_unity() {
                if let Some(s) = rational_nth_root(&r, m) {
                    let z = zeta_reduced(m as u64 * big_m, j);
                    let root = z.checked_mul(&mono)?.scale(&s);
                    return Ok(Some(root));
                }
            }
            // next exponent vector
            let mut k = 0;
            loop {
                if k == exps.len() {
                    return Ok(None);
                }
                exps[k] += 1;
                if exps[k] < degrees[k] {
                    break;
                }
                exps[k] = 0;
                k += 1;
            }
        }
    }

    /// Generator `x_k` of the tower as an element.
    pub fn radical_generator(&self, k: usize) -> Option<FieldElement> {
        if k >= self.tower.depth() {
            return None;
        }
        let mut exps = vec![0; self.tower.depth()];
        exps[k] = 1;
        Some(monomial_in(&self.tower, &exps))
    }

    fn fmt_terms(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e = self.simplify();
        let t = &e.tower;
        let mut terms: Vec<(Rational, String)> = Vec::new();
        for (idx, c) in e.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            // decompose idx into (zeta exponent, radical exponents)
            let mut rest = idx;
            let mut parts = Vec::new();
            let mut rad_exps = vec![0; t.depth()];
            for level in (1..=t.depth()).rev() {
                let sub = t.dims[level - 1];
                rad_exps[level - 1] = rest / sub;
                rest %= sub;
            }
            if rest > 0 {
                if rest == 1 {
                    parts.push(format!("zeta({})", t.order));
                } else {
                    parts.push(format!("zeta({})^{}", t.order, rest));
                }
            }
            for (k, ex) in rad_exps.iter().enumerate() {
                if *ex == 0 {
                    continue;
                }
                let r = &t.radicals[k];
                let s = format!("root({}, {})", r.radicand, r.degree);
                if *ex == 1 {
                    parts.push(s);
                } else {
                    parts.push(format!("{s}^{ex}"));
                }
            }
            terms.push((c.clone(), parts.join("*")));
        }
        if terms.is_empty() {
            return write!(f, "0/1");
        }
        for (i, (c, mono)) in terms.iter().enumerate() {
            let (sign, abs) = if c.is_negative() { ("-", -c) } else { ("", c.clone()) };
            if i == 0 {
                write!(f, "{sign}")?;
            } else if sign == "-" {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            write!(f, "{}/{}", abs.numer(), abs.denom())?;
            if !mono.is_empty() {
                write!(f, "*{mono}")?;
            }
        }
        Ok(())
    }

    /// Number of terms in the printed form.
    pub fn term_count(&self) -> usize {
        self.simplify().coeffs.iter().filter(|c| !c.is_zero()).count()
    }
}

fn approx_level(tower: &Tower, level: usize, coeffs: &[Rational]) -> Complex64 {
    if level == 0 {
        let n = tower.order as f64;
        return coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| {
                let angle = 2.0 * PI * i as f64 / n;
                Complex64::from_polar(c.to_f64().unwrap_or(f64::NAN), angle)
            })
            .sum();
    }
    let rad = &tower.radicals[level - 1];
    let sub = tower.dims[level - 1];
    let mut acc = Complex64::new(0.0, 0.0);
    let mut power = Complex64::new(1.0, 0.0);
    for j in 0..rad.degree {
        acc += approx_level(tower, level - 1, &coeffs[j * sub..(j + 1) * sub]) * power;
        power *= rad.value;
    }
    acc
}

fn monomial_in(tower: &Arc<Tower>, exps: &[usize]) -> FieldElement {
    let mut idx = 0;
    for (k, e) in exps.iter().enumerate() {
        idx += e * tower.dims[k];
    }
    let mut coeffs = vec![Rational::zero(); tower.dim()];
    coeffs[idx] = Rational::one();
    FieldElement { tower: tower.clone(), coeffs }
}

fn rational_nth_root(r: &Rational, m: usize) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let m32 = m as u32;
    let n = r.numer().nth_root(m32);
    let d = r.denom().nth_root(m32);
    if num_traits::pow(n.clone(), m) == *r.numer() && num_traits::pow(d.clone(), m) == *r.denom() {
        Some(Rational::new(n, d))
    } else {
        None
    }
}

fn squarefree_part(mut n: BigInt) -> BigInt {
    let mut out = BigInt::one();
    let mut p = BigInt::from(2);
    while &p * &p <= n {
        let mut e = 0;
        while (&n % &p).is_zero() {
            n /= &p;
            e += 1;
        }
        if e % 2 == 1 {
            out *= &p;
        }
        p += 1;
    }
    out * n
}

/// Whether `sqrt(r)` (r > 0 rational) lies in `Q(zeta_order)`, by the conductor
/// of the quadratic field.
fn sqrt_in_cyclotomic(r: &Rational, order: u64) -> bool {
    let d = squarefree_part(r.numer() * r.denom());
    if d.is_one() {
        return true;
    }
    let disc = if (&d % 4u32) == BigInt::one() { d } else { d * 4 };
    let n = if order % 2 == 1 { order * 2 } else { order };
    (BigInt::from(n) % disc).is_zero()
}

fn small_primes_dividing(m: usize) -> Vec<usize> {
    (2..=m).filter(|p| m % p == 0 && (2..*p).all(|q| p % q != 0)).collect()
}

/// Adjoins `x` with `x^degree = radicand` on top of `tower`, returning `x`.
fn extend_tower(
    tower: &Arc<Tower>,
    degree: usize,
    radicand: FieldElement,
) -> Result<FieldElement, FieldError> {
    let radicand = radicand.lift_to(tower)?;
    if tower.depth() + 1 > MAX_TOWER_DEPTH {
        return Err(FieldError::DepthExceeded(tower.depth() + 1));
    }
    let rational = radicand.is_rational();
    for p in small_primes_dividing(degree) {
        let hazard = radicand.find_root(p)?.is_some()
            || (p == 2 && rational && sqrt_in_cyclotomic(&radicand.coeffs[0], tower.order));
        if hazard {
            return Err(FieldError::Reducible { degree, radicand: radicand.to_string() });
        }
    }
    let value = radicand.approx().powf(1.0 / degree as f64);
    let mut radicals = tower.radicals.clone();
    radicals.push(Radical { degree, radicand, value });
    let mut dims = tower.dims.clone();
    dims.push(tower.dim() * degree);
    let new = Arc::new(Tower {
        order: tower.order,
        base_degree: tower.base_degree,
        powers: tower.powers.clone(),
        radicals,
        dims,
    });
    let mut exps = vec![0; new.depth()];
    *exps.last_mut().unwrap() = 1;
    Ok(monomial_in(&new, &exps))
}

/// The positive square root of a squarefree positive integer `d`, or `i*sqrt(-d)`
/// for negative `d`, written with Gauss sums.
fn cyclotomic_sqrt(d: &BigInt) -> FieldElement {
    let mut acc = if d.is_negative() { FieldElement::zeta(4) } else { FieldElement::one() };
    let mut n = d.abs();
    let mut p = 2u64;
    while !n.is_one() {
        if (&n % p).is_zero() {
            n /= p;
            let root = if p == 2 {
                FieldElement::zeta(8) + FieldElement::zeta_pow(8, 7)
            } else {
                let mut g = FieldElement::zeta_pow(p, 0);
                for k in 1..p {
                    g = g + FieldElement::zeta_pow(p, ((k * k) % p) as i64);
                }
                if p % 4 == 3 {
                    g * FieldElement::zeta_pow(4, 3)
                } else {
                    g
                }
            };
            acc = acc * root;
        }
        p += 1;
    }
    acc
}

/// `sqrt(r)` for a positive rational whose square root is cyclotomic.
fn rational_sqrt_cyclotomic(r: &Rational) -> FieldElement {
    let nd = r.numer() * r.denom();
    let d = squarefree_part(nd.clone());
    let k = (nd / &d).sqrt();
    cyclotomic_sqrt(&d).scale(&Rational::new(k, r.denom().clone()))
}

/// Lift an element to a tower with the same radicals (as a prefix) over a
/// larger cyclotomic order.
fn lift_same_shape(e: &FieldElement, target: &Arc<Tower>) -> FieldElement {
    let src = &e.tower;
    let d_old = src.base_degree;
    let ratio = target.order / src.order;
    let mut coeffs = Vec::with_capacity(target.dim());
    for chunk in e.coeffs.chunks(d_old) {
        let mut lifted = vec![Rational::zero(); target.base_degree];
        for (i, c) in chunk.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let pw = &target.powers[((i as u64 * ratio) % target.order) as usize];
            for (l, p) in lifted.iter_mut().zip(pw) {
                if !p.is_zero() {
                    *l += c * p;
                }
            }
        }
        coeffs.extend(lifted);
    }
    coeffs.resize(target.dim(), Rational::zero());
    FieldElement { tower: target.clone(), coeffs }
}

/// Evaluate `e` inside `target`, mapping the cyclotomic base by order lifting
/// and the radicals of `e` to `images`.
fn eval_into(e: &FieldElement, target: &Arc<Tower>, images: &[FieldElement]) -> FieldElement {
    eval_level(&e.tower, e.tower.depth(), &e.coeffs, target, images)
}

fn eval_level(
    src: &Arc<Tower>,
    level: usize,
    coeffs: &[Rational],
    target: &Arc<Tower>,
    images: &[FieldElement],
) -> FieldElement {
    if level == 0 {
        let base = FieldElement { tower: base_tower(src.order), coeffs: coeffs.to_vec() };
        let lifted = lift_same_shape(&base, &base_tower(target.order));
        let mut c = lifted.coeffs;
        c.resize(target.dim(), Rational::zero());
        return FieldElement { tower: target.clone(), coeffs: c };
    }
    let m = src.radicals[level - 1].degree;
    let sub = src.dims[level - 1];
    let x = &images[level - 1];
    let mut acc = FieldElement::constant_in(target, Rational::zero());
    let mut power = FieldElement::constant_in(target, Rational::one());
    for j in 0..m {
        let chunk = &coeffs[j * sub..(j + 1) * sub];
        if !is_zero_slice(chunk) {
            let v = eval_level(src, level - 1, chunk, target, images);
            acc = add_same(&acc, &mul_same(&v, &power));
        }
        if j + 1 < m {
            power = mul_same(&power, x);
        }
    }
    acc
}

fn add_same(a: &FieldElement, b: &FieldElement) -> FieldElement {
    a.with_coeffs(a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + y).collect())
}

fn mul_same(a: &FieldElement, b: &FieldElement) -> FieldElement {
    let d = a.tower.depth();
    a.with_coeffs(a.tower.mul_level(d, &a.coeffs, &b.coeffs))
}

/// Whether `small` embeds into `big` by order lifting and zero padding.
fn is_prefix(small: &Tower, big: &Tower) -> bool {
    big.order % small.order == 0
        && small.depth() <= big.depth()
        && small.radicals.iter().zip(&big.radicals).all(|(a, b)| {
            a.degree == b.degree && lift_same_shape(&a.radicand, &b.radicand.tower).coeffs == b.radicand.coeffs
        })
}

fn prefix_of(t: &Arc<Tower>, depth: usize) -> Arc<Tower> {
    if depth == t.depth() {
        t.clone()
    } else if depth == 0 {
        base_tower(t.order)
    } else {
        t.radicals[depth].radicand.tower.clone()
    }
}

fn embed_prefix(e: &FieldElement, big: &Arc<Tower>) -> FieldElement {
    let pre = prefix_of(big, e.tower.depth());
    let lifted = if pre.order == e.tower.order { e.coeffs.clone() } else { lift_same_shape(e, &pre).coeffs };
    let mut coeffs = lifted;
    coeffs.resize(big.dim(), Rational::zero());
    FieldElement { tower: big.clone(), coeffs }
}

fn coerce_pair(x: &FieldElement, y: &FieldElement) -> Result<(FieldElement, FieldElement), FieldError> {
    if Arc::ptr_eq(&x.tower, &y.tower) || x.tower.same_as(&y.tower) {
        return Ok((x.clone(), y.with_coeffs(y.coeffs.clone()).retower(&x.tower)));
    }
    if x.coeffs.len() == 1 && x.tower.order == 1 {
        return Ok((FieldElement::constant_in(&y.tower, x.coeffs[0].clone()), y.clone()));
    }
    if y.coeffs.len() == 1 && y.tower.order == 1 {
        return Ok((x.clone(), FieldElement::constant_in(&x.tower, y.coeffs[0].clone())));
    }
    if is_prefix(&x.tower, &y.tower) {
        return Ok((embed_prefix(x, &y.tower), y.clone()));
    }
    if is_prefix(&y.tower, &x.tower) {
        return Ok((x.clone(), embed_prefix(y, &x.tower)));
    }
    // general case: re-adjoin the radicals of both sides over the common base
    let order = x.tower.order.lcm(&y.tower.order);
    let mut target = base_tower(order);
    let mut ims_x: Vec<FieldElement> = Vec::new();
    let mut ims_y: Vec<FieldElement> = Vec::new();
    for side in 0..2 {
        let src = if side == 0 { &x.tower } else { &y.tower };
        for rad in &src.radicals {
            let ims = if side == 0 { &ims_x } else { &ims_y };
            let gamma = eval_into(&rad.radicand, &target, ims);
            let root = gamma.adjoin_root(rad.degree)?;
            if !Arc::ptr_eq(&root.tower, &target) && !root.tower.same_as(&target) {
                target = root.tower.clone();
            }
            if side == 0 {
                ims_x.push(root);
            } else {
                ims_y.push(root);
            }
            settle(&mut ims_x, &mut ims_y, &mut target)?;
        }
    }
    Ok((eval_into(x, &target, &ims_x), eval_into(y, &target, &ims_y)))
}

/// Moves every image into one tower, enlarging `target` as needed.
fn settle(
    xs: &mut [FieldElement],
    ys: &mut [FieldElement],
    target: &mut Arc<Tower>,
) -> Result<(), FieldError> {
    for _ in 0..8 {
        let mut moved = false;
        for im in xs.iter_mut().chain(ys.iter_mut()) {
            if im.tower.same_as(target) {
                *im = im.clone().retower(target);
                continue;
            }
            let (a, _) = coerce_pair(im, &FieldElement::constant_in(target, Rational::zero()))?;
            if !a.tower.same_as(target) {
                *target = a.tower.clone();
                moved = true;
            }
            *im = a;
        }
        if !moved {
            return Ok(());
        }
    }
    Err(FieldError::DepthExceeded(target.depth() + 1))
}

/// `exp(2 pi i k / n)` over the smallest cyclotomic order containing it.
fn zeta_reduced(n: u64, k: u64) -> FieldElement {
    let k = k % n;
    let g = n.gcd(&k);
    FieldElement::zeta_pow(n / g, (k / g) as i64)
}

impl FieldElement {
    fn retower(mut self, t: &Arc<Tower>) -> Self {
        self.tower = t.clone();
        self
    }
}

/// Solves `sum_j x_j cols[j] = target` over Q; `None` when inconsistent or singular.
fn solve_linear(cols: &[Vec<Rational>], target: &[Rational]) -> Option<Vec<Rational>> {
    let rows = target.len();
    let ncols = cols.len();
    let mut m: Vec<Vec<Rational>> = (0..rows)
        .map(|i| {
            let mut r: Vec<Rational> = cols.iter().map(|c| c[i].clone()).collect();
            r.push(target[i].clone());
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        let p = (row..rows).find(|&r| !m[r][col].is_zero())?;
        m.swap(row, p);
        let inv = m[row][col].recip();
        for v in m[row].iter_mut() {
            *v *= &inv;
        }
        for r in 0..rows {
            if r != row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in col..=ncols {
                    let t = &f * &m[row][c];
                    m[r][c] -= t;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    if (row..rows).any(|r| !m[r][ncols].is_zero()) {
        return None;
    }
    let mut x = vec![Rational::zero(); ncols];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = m[r][ncols].clone();
    }
    Some(x)
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        match coerce_pair(self, other) {
            Ok((a, b)) => a.coeffs == b.coeffs,
            Err(_) => false,
        }
    }
}

impl Eq for FieldElement {}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_terms(f)
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldElement({self})")
    }
}

impl From<i64> for FieldElement {
    fn from(n: i64) -> Self {
        FieldElement::from_int(n)
    }
}

impl From<Rational> for FieldElement {
    fn from(q: Rational) -> Self {
        FieldElement::rational(q)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl $tr<&FieldElement> for &FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: &FieldElement) -> FieldElement {
                self.$checked(rhs).unwrap_or_else(|e| panic!("incompatible scalar fields: {e}"))
            }
        }
        impl $tr<FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: FieldElement) -> FieldElement {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: &FieldElement) -> FieldElement {
                (&self).$method(rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        self.with_coeffs(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> FieldElement {
        FieldElement::from_ratio(n, d)
    }

    #[test]
    fn zeta_relations() {
        let i = FieldElement::zeta(4);
        assert_eq!(&i * &i, q(-1, 1));
        assert_eq!(FieldElement::zeta(6).pow(3).unwrap(), q(-1, 1));
        let z = FieldElement::zeta(3);
        let s = FieldElement::one() + z.clone() + &z * &z;
        assert!(s.is_zero());
        for n in 1..=12u64 {
            assert!(FieldElement::zeta(n).pow(n as i64).unwrap().is_one());
            for k in 1..n as i64 {
                assert!(!FieldElement::zeta(n).pow(k).unwrap().is_one());
                let prod = FieldElement::zeta_pow(n, k) * FieldElement::zeta_pow(n, n as i64 - k);
                assert!(prod.is_one());
            }
        }
    }

    #[test]
    fn lifting_to_common_field() {
        let (a, b, n) =
            FieldElement::lift_to_common_field(&FieldElement::zeta(2), &FieldElement::zeta(3)).unwrap();
        assert_eq!(n, 6);
        assert_eq!(a, FieldElement::zeta_pow(6, 3));
        assert_eq!(b, FieldElement::zeta_pow(6, 2));
        let (a, b, n) = FieldElement::lift_to_common_field(&q(1, 2), &FieldElement::zeta(4)).unwrap();
        assert_eq!((a, b.clone(), n), (q(1, 2), FieldElement::zeta(4), 4));
        let (a, b, n) =
            FieldElement::lift_to_common_field(&FieldElement::zeta(4), &FieldElement::zeta(6)).unwrap();
        assert_eq!(n, 12);
        assert!(a.pow(4).unwrap().is_one() && !a.pow(2).unwrap().is_one());
        assert!(b.pow(6).unwrap().is_one() && !b.pow(3).unwrap().is_one() && !b.pow(2).unwrap().is_one());
    }

    #[test]
    fn inverse_and_division() {
        let x = FieldElement::one() + FieldElement::zeta(5);
        let y = x.inverse().unwrap();
        assert!((&x * &y).is_one());
        assert_eq!(q(1, 1).checked_div(&q(0, 1)), Err(FieldError::DivisionByZero));
    }

    #[test]
    fn roots_follow_branch_rule() {
        assert!(q(1, 1).adjoin_root(3).unwrap().is_one());
        assert_eq!(q(4, 1).adjoin_root(2).unwrap(), q(2, 1));
        assert_eq!(q(-1, 1).adjoin_root(2).unwrap(), FieldElement::zeta(4));
        assert_eq!(FieldElement::zeta(3).adjoin_root(2).unwrap(), FieldElement::zeta(6));
        let x = q(2, 1).adjoin_root(2).unwrap();
        assert_eq!(x.tower().depth(), 1);
        assert_eq!(&x * &x, q(2, 1));
        assert!((x.approx().re - 2f64.sqrt()).abs() < 1e-12);
        // sqrt(8) reuses sqrt(2)
        let y = (&x * &x * q(4, 1)).adjoin_root(2).unwrap();
        assert_eq!(y, &x * &q(2, 1));
        assert_eq!(y.tower().depth(), 1);
    }

    #[test]
    fn reducibility_and_depth_are_refused() {
        // sqrt(2) already lives in Q(zeta_8)
        let two = (FieldElement::zeta(8) * q(2, 1)).checked_div(&FieldElement::zeta(8)).unwrap();
        let r = two.adjoin_root(2).unwrap();
        assert_eq!(r.tower().depth(), 0);
        assert_eq!(r, FieldElement::zeta(8) + FieldElement::zeta_pow(8, 7));
        // a generator that squares to 2 cannot be adjoined over Q(zeta_8)
        let base = FieldElement::zeta(8).tower().clone();
        assert!(matches!(
            extend_tower(&base, 2, FieldElement::constant_in(&base, Rational::from_integer(2.into()))),
            Err(FieldError::Reducible { .. })
        ));
        let a = q(2, 1).adjoin_root(2).unwrap();
        let b = (&a + &q(1, 1)).adjoin_root(3).unwrap();
        assert_eq!(b.tower().depth(), 2);
        assert!(matches!((&b + &q(1, 1)).adjoin_root(5), Err(FieldError::DepthExceeded(3))));
    }

    #[test]
    fn independent_towers_unify() {
        let a = q(2, 1).adjoin_root(2).unwrap();
        let b = q(3, 1).adjoin_root(2).unwrap();
        let ab = &a * &b;
        assert_eq!(&ab * &ab, q(6, 1));
        let c = q(8, 1).adjoin_root(2).unwrap();
        assert_eq!(c, &a * &q(2, 1));
    }

    #[test]
    fn simplify_and_display() {
        let e = FieldElement::zeta_pow(12, 3);
        assert_eq!(e.to_string(), "1/1*zeta(4)");
        assert_eq!((FieldElement::zeta_pow(12, 6)).to_string(), "-1/1");
        assert_eq!(q(-3, 2).to_string(), "-3/2");
    }

    #[test]
    fn ordering_is_total_and_consistent() {
        let vals = [q(1, 1), FieldElement::zeta(3), q(-2, 1), FieldElement::zeta(4)];
        for a in &vals {
            assert_eq!(a.canonical_cmp(a), Ordering::Equal);
            for b in &vals {
                assert_eq!(a.canonical_cmp(b), b.canonical_cmp(a).reverse());
            }
        }
    }
}

#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;

    fn element() -> impl Strategy<Value = FieldElement> {
        (prop::sample::select(vec![1u64, 3, 4, 5, 6, 8, 12]), prop::collection::vec((-6i64..7, 1i64..4), 1..5))
            .prop_map(|(n, cs)| {
                cs.into_iter().enumerate().fold(FieldElement::zero(), |acc, (k, (a, b))| {
                    acc + FieldElement::zeta_pow(n, k as i64) * FieldElement::from_ratio(a, b)
                })
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn ring_axioms(a in element(), b in element(), c in element()) {
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!((&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &a * &b + &a * &c);
            prop_assert!((&a - &a).is_zero());
        }

        #[test]
        fn inverses(a in element()) {
            prop_assume!(!a.is_zero());
            prop_assert!((&a * &a.inverse().unwrap()).is_one());
        }

        #[test]
        fn simplify_preserves_value(a in element()) {
            prop_assert_eq!(a.simplify(), a.clone());
            prop_assert_eq!(a.simplify().to_string(), a.to_string());
        }

        #[test]
        fn roots_are_roots(a in element(), m in 2usize..4) {
            prop_assume!(!a.is_zero());
            if let Ok(r) = a.adjoin_root(m) {
                prop_assert_eq!(r.pow(m as i64).unwrap(), a);
            }
        }
    }
}

#[cfg(test)]
mod mixed {
    use super::*;

    #[test]
    fn radical_times_cyclotomic() {
        let s2 = FieldElement::from_int(2).adjoin_root(2).unwrap();
        let a = &s2 * &FieldElement::zeta(3);
        assert_eq!(&a * &s2, FieldElement::zeta(3) * FieldElement::from_int(2));
        assert_eq!(&a * &a, FieldElement::zeta_pow(3, 2) * FieldElement::from_int(2));
    }
}
