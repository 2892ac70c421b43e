//! Text and JSON rendering.

use serde_json::{json, Value};

use crate::connection::{format_eigenvalue, ElementaryConnection, FormalConnection, RegularPart};

pub fn text(m: &FormalConnection) -> String {
    m.to_string()
}

fn jordan_json(r: &RegularPart) -> Value {
    Value::Array(
        r.blocks()
            .iter()
            .map(|b| json!({ "eigenvalue": format_eigenvalue(&b.eigenvalue), "size": b.size }))
            .collect(),
    )
}

pub fn summand_json(el: &ElementaryConnection) -> Value {
    let inv = el.invariants();
    json!({
        "rho": el.rho().series().to_string(),
        "phi": el.phi().series().to_string(),
        "jordan": jordan_json(el.reg()),
        "p": el.p(),
        "q": el.q(),
        "r": el.r(),
        "slope": inv.slope.to_string(),
        "irr": el.irregularity(),
        "rank": el.rank(),
        "text": el.to_string(),
    })
}

pub fn connection_json(m: &FormalConnection) -> Value {
    json!({
        "summands": m.summands.iter().map(summand_json).collect::<Vec<_>>(),
        "total": { "rank": m.rank(), "irr": m.irregularity() },
        "provenance": m.provenance,
        "text": text(m),
    })
}
