//! Browser bindings. Every function returns a JSON string or an error message.

use focj::cut::eliminate_cuts_traced;
use focj::json::{derivation_from_json, derivation_to_json, model_from_json, model_to_json, search_result_to_json, trace_to_json};
use focj::kernel::mixed_example;
use focj::kripke::{two_world_countermodel, CountermodelBounds};
use focj::parse::{parse_formula, parse_sequent};
use focj::render::{derivation_tree, model_report};
use focj::search::{prove as search, SearchLimits, SearchResult};
use focj::syntax::Signature;
use serde_json::json;
use wasm_bindgen::prelude::*;

fn to_string(v: serde_json::Value) -> String {
    serde_json::to_string_pretty(&v).expect("json")
}

/// Searches for a derivation, falling back to a small countermodel.
#[wasm_bindgen]
pub fn prove(sequent: &str, depth: usize) -> Result<String, String> {
    let s = parse_sequent(sequent, &mut Signature::new()).map_err(|e| e.to_string())?;
    let lim = SearchLimits {
        max_depth: depth,
        countermodel: Some(CountermodelBounds::new(2, 2)),
        max_steps: 50_000,
        ..SearchLimits::default()
    };
    let r = search(&s, &lim);
    let text = match &r {
        SearchResult::Proved(d) => derivation_tree(d),
        SearchResult::Refuted(cm, _) => format!("refuted at world {}\n{}", cm.world, model_report(&cm.model)),
        SearchResult::NotProvedWithinLimits(_) => "not proved within limits\n".to_string(),
    };
    Ok(to_string(json!({"result": search_result_to_json(&r), "text": text})))
}

/// Evaluates a closed formula at a world of a JSON model.
#[wasm_bindgen]
pub fn eval(model: &str, world: &str, formula: &str) -> Result<String, String> {
    let m = model_from_json(model).map_err(|e| e.to_string())?;
    m.validate().map_err(|vs| vs.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("\n"))?;
    let f = parse_formula(formula, &mut Signature::new()).map_err(|e| e.to_string())?;
    let b = m.eval(world, &f).map_err(|e| e.to_string())?;
    Ok(to_string(json!({"world": world, "formula": f.to_string(), "value": b})))
}

/// Removes all cuts from a JSON derivation and reports the reduction trace.
#[wasm_bindgen]
pub fn elim(derivation: &str) -> Result<String, String> {
    let d = derivation_from_json(derivation).map_err(|e| e.to_string())?;
    let (e, trace) = eliminate_cuts_traced(&d).map_err(|e| e.to_string())?;
    Ok(to_string(json!({
        "derivation": derivation_to_json(&e),
        "trace": trace_to_json(&trace),
        "text": derivation_tree(&e),
    })))
}

#[wasm_bindgen]
pub fn sample_model() -> String {
    to_string(model_to_json(&two_world_countermodel()))
}

#[wasm_bindgen]
pub fn sample_derivation() -> String {
    to_string(derivation_to_json(&mixed_example()))
}
