//! Centralizers, the rigidity index and the Z - Z^ relation.

use std::collections::HashMap;

use thiserror::Error;

use crate::connection::{ConnectionError, ElementaryConnection, FormalConnection, RegularPart};
use crate::fourier::{Location, RegularGermData, SingularityDatum};
use crate::structure::end_irregularity;

#[derive(Debug, Error)]
pub enum RigidityError {
    #[error("inconsistent germ data: dim Z defect {defect} but kappa^2 = {kappa_sq}")]
    InconsistentGerm { defect: i64, kappa_sq: i64 },
    #[error("non-minimal local data at {0}")]
    NonMinimal(String),
    #[error("slope bookkeeping mismatch: {0}")]
    Bookkeeping(String),
    #[error("rank differs between singular points: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error(transparent)]
    Connection(#[from] ConnectionError),
}

pub type Result<T> = std::result::Result<T, RigidityError>;

/// `dim Z(T) = sum over pairs of blocks with equal eigenvalue of min(b_i, b_j)`.
pub fn dim_centralizer(j: &RegularPart) -> usize {
    let b = j.blocks();
    let mut total = 0;
    for x in b {
        for y in b {
            if x.eigenvalue == y.eigenvalue {
                total += x.size.min(y.size);
            }
        }
    }
    total
}

/// `dim ker(T - Id)`.
pub fn dim_fixed(j: &RegularPart) -> usize {
    j.blocks().iter().filter(|b| b.eigenvalue.is_one()).count()
}

/// `rho_+ T = T^{1/p} (x) P_p`.
pub fn pushforward_monodromy(j: &RegularPart, p: usize) -> Result<RegularPart> {
    Ok(j.pushforward(p)?)
}

/// `dim Z(psi T) - dim Z(phi T)`, checked against `kappa^2`.
pub fn zmin_defect(g: &RegularGermData) -> Result<i64> {
    let defect = dim_centralizer(&g.psi) as i64 - dim_centralizer(&g.phi) as i64;
    let kappa_sq = (g.kappa * g.kappa) as i64;
    if defect != kappa_sq {
        return Err(RigidityError::InconsistentGerm { defect, kappa_sq });
    }
    Ok(defect)
}

/// Exponential types at one point with their merged regular parts.
fn local_types(d: &SingularityDatum) -> Result<Vec<ElementaryConnection>> {
    let all = d.all_summands()?;
    for el in &all {
        if !el.is_minimal() {
            return Err(RigidityError::NonMinimal(format!("{}: {el}", d.location)));
        }
    }
    Ok(FormalConnection::new(all).canonicalize()?.summands)
}

/// Contribution of one point to the rigidity index.
#[derive(Debug, Clone)]
pub struct PointContribution {
    pub location: String,
    pub rank: usize,
    pub irr_end: i64,
    pub z: i64,
}

pub fn point_contribution(d: &SingularityDatum) -> Result<PointContribution> {
    let types = local_types(d)?;
    let m = FormalConnection::new(types.clone());
    let irr_end = end_irregularity(&m)? as i64;
    let z = types.iter().map(|t| (t.p() * dim_centralizer(t.reg())) as i64).sum();
    Ok(PointContribution { location: d.location.to_string(), rank: m.rank(), irr_end, z })
}

/// The rigidity index and its per-point breakdown, with `chi_top = 2 - 2g - #S`.
pub fn rigidity_breakdown(data: &[SingularityDatum], genus: i64) -> Result<(i64, Vec<PointContribution>)> {
    let rows = data.iter().map(point_contribution).collect::<Result<Vec<_>>>()?;
    let r = rows.first().map_or(0, |c| c.rank);
    if let Some(c) = rows.iter().find(|c| c.rank != r) {
        return Err(RigidityError::RankMismatch(r, c.rank));
    }
    let chi = 2 - 2 * genus - data.len() as i64;
    let r = r as i64;
    let rig = r * r * chi + rows.iter().map(|c| c.irr_end + c.z).sum::<i64>();
    Ok((rig, rows))
}

pub fn rigidity_index(data: &[SingularityDatum], genus: i64) -> Result<i64> {
    Ok(rigidity_breakdown(data, genus)?.0)
}

type Key = (usize, usize, usize);

fn key(el: &ElementaryConnection) -> Key {
    (el.p(), el.q(), dim_centralizer(el.reg()))
}

/// Matches expected `(p, q, dim Z)` triples one-to-one against actual types.
fn match_types(expected: Vec<Key>, actual: Vec<Key>, what: &str) -> Result<()> {
    let mut pool: HashMap<Key, i64> = HashMap::new();
    for k in actual {
        *pool.entry(k).or_default() += 1;
    }
    for k in expected {
        match pool.get_mut(&k) {
            Some(n) if *n > 0 => *n -= 1,
            _ => {
                return Err(RigidityError::Bookkeeping(format!(
                    "{what}: no counterpart with (p, q, dim Z) = {k:?}"
                )))
            }
        }
    }
    if let Some((k, _)) = pool.iter().find(|(_, n)| **n > 0) {
        return Err(RigidityError::Bookkeeping(format!("{what}: unmatched type {k:?}")));
    }
    Ok(())
}

/// Expected types at the opposite infinity produced by the finite points of `side`.
fn finite_images(side: &[SingularityDatum]) -> Vec<Key> {
    let mut out = Vec::new();
    for d in side {
        let Location::Finite(s) = &d.location else { continue };
        let twisted = !s.is_zero();
        if !d.germ.phi.is_empty() {
            out.push((1, twisted as usize, dim_centralizer(&d.germ.phi)));
        }
        for el in &d.summands {
            let p_hat = el.p() + el.q();
            out.push((p_hat, if twisted { p_hat } else { el.q() }, dim_centralizer(el.reg())));
        }
    }
    out
}

fn infinity_types(side: &[SingularityDatum]) -> Result<Vec<ElementaryConnection>> {
    let mut out = Vec::new();
    for d in side.iter().filter(|d| d.is_infinity()) {
        out.extend(local_types(d)?);
    }
    Ok(out)
}

fn z_total(side: &[SingularityDatum]) -> Result<i64> {
    side.iter().map(|d| point_contribution(d).map(|c| c.z)).sum()
}

/// `(Z - Z^) - RHS`, zero on mutually consistent data.
///
/// The finite-point terms use `p^ - p = q`, the relation satisfied by the
/// local transform `F^(s,inf)`, so they enter as `kappa^2 - q dim Z`.
pub fn z_zhat_discrepancy(data: &[SingularityDatum], data_hat: &[SingularityDatum]) -> Result<i64> {
    let inf = infinity_types(data)?;
    let inf_hat = infinity_types(data_hat)?;

    let (above, at_most_one): (Vec<_>, Vec<_>) = inf.iter().partition(|t| t.q() > t.p());
    let mut expected_hat = finite_images(data);
    expected_hat.extend(above.iter().map(|t| (t.q() - t.p(), t.q(), dim_centralizer(t.reg()))));
    match_types(expected_hat, inf_hat.iter().map(key).collect(), "transformed infinity")?;
    match_types(
        finite_images(data_hat),
        at_most_one.iter().map(|t| key(t)).collect(),
        "slope <= 1 part at infinity",
    )?;

    let lhs = z_total(data)? - z_total(data_hat)?;
    let finite_term = |side: &[SingularityDatum]| -> i64 {
        side.iter()
            .filter(|d| !d.is_infinity())
            .map(|d| {
                let k = d.germ.kappa as i64;
                k * k - d.summands.iter().map(|e| (e.q() * dim_centralizer(e.reg())) as i64).sum::<i64>()
            })
            .sum()
    };
    let inf_term: i64 = above
        .iter()
        .map(|t| (2 * t.p() as i64 - t.q() as i64) * dim_centralizer(t.reg()) as i64)
        .sum();
    let rhs = finite_term(data) - finite_term(data_hat) + inf_term;
    Ok(lhs - rhs)
}
