//! Browser bindings for the dimension computations. Every export returns a
//! JSON string; errors come back as `{"error": "..."}`.

use std::sync::Arc;

use serde_json::{json, Value};
use treedim::bsv::BsvContext;
use treedim::tree::{AutomatonSpec, Degree, Element, PointBudget, DEFAULT_POINT_BUDGET};
use wasm_bindgen::prelude::*;

fn respond(r: treedim::Result<Value>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e.to_string() }).to_string(),
    }
}

fn closed_form_value(m: usize) -> treedim::Result<Value> {
    let ctx = BsvContext::new(Degree::new(m)?, PointBudget(DEFAULT_POINT_BUDGET));
    let (r, c, f) = ctx.hausdorff_closed_form();
    Ok(json!({ "m": m, "rational": r.to_string(), "log2_coeff": c.to_string(), "float": f }))
}

/// Closed-form Hausdorff dimension of the BSV group on the `m`-adic tree.
#[wasm_bindgen]
pub fn closed_form(m: usize) -> String {
    respond(closed_form_value(m))
}

/// Closed forms for every `m` in `2..=m_max`, for plotting against `m`.
#[wasm_bindgen]
pub fn closed_form_curve(m_max: usize) -> String {
    respond((2..=m_max).map(closed_form_value).collect::<treedim::Result<Vec<_>>>().map(Value::from))
}

/// Level-by-level report: indices, `s_n`, partial dimensions and tails.
#[wasm_bindgen]
pub fn dimension_series(m: usize, max_level: usize) -> String {
    respond((|| {
        let ctx = BsvContext::new(Degree::new(m)?, PointBudget(DEFAULT_POINT_BUDGET));
        let report = ctx.dimension_report(max_level)?;
        Ok(serde_json::to_value(report).expect("report serializes"))
    })())
}

/// Permutation induced on level `n` by a word in `a`, `b` and their inverses.
#[wasm_bindgen]
pub fn level_action(m: usize, word: &str, n: usize) -> String {
    respond((|| {
        let spec = Arc::new(AutomatonSpec::bsv(m)?);
        let g = Element::parse(&spec, word)?;
        let p = g.level_permutation(n, PointBudget(DEFAULT_POINT_BUDGET))?;
        Ok(json!({
            "word": g.display_word(),
            "level": n,
            "images": p.images(),
            "cycles": p.cycles().into_iter().filter(|c| c.len() > 1).collect::<Vec<_>>(),
            "order": p.order().to_string(),
        }))
    })())
}
