//! wasm-bindgen exports for the static demo page in `www/`. Every export
//! returns a JSON string; errors come back as `{"error": "..."}`.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use sumprod::coloring::{catalog_colorings, parse_coloring};
use sumprod::pattern::catalog_patterns;
use sumprod::pipeline::{dx_witness_constructive, DxBudget};
use sumprod::searchers::{largest_avoiding, Engine, ExtremalOptions, ExtremalOutcome};
use sumprod::{catalog_pattern, pattern_search, Coloring, Domain, RationalMode, SearchBudget};

const NODE_CAP: u64 = 2_000_000;

fn respond(r: Result<Value, String>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e }).to_string(),
    }
}

fn coloring(spec: &str, domain: &str) -> Result<Coloring, String> {
    let d = Domain::parse(domain).ok_or_else(|| format!("unknown domain {domain:?}"))?;
    let desc = parse_coloring(spec, d).map_err(|e| e.to_string())?;
    Coloring::from_descriptor(&desc).map_err(|e| e.to_string())
}

pub fn search_json(pattern: &str, spec: &str, domain: &str, bound: u32, distinct: bool) -> Result<Value, String> {
    let p = catalog_pattern(pattern).map_err(|e| e.to_string())?.with_distinct(distinct);
    let c = coloring(spec, domain)?;
    let budget = match c.domain() {
        Domain::Naturals => SearchBudget::integers(vec![(1, bound as i64)], NODE_CAP),
        Domain::PositiveRationals => SearchBudget::rationals(bound as u64, RationalMode::PositiveOnly, NODE_CAP),
        Domain::NonzeroRationals => SearchBudget::rationals(bound as u64, RationalMode::FullNonzero, NODE_CAP),
    };
    let out = pattern_search(&c, &p, &budget).map_err(|e| e.to_string())?;
    let mut v = serde_json::to_value(&out).map_err(|e| e.to_string())?;
    if let Some(w) = out.witness() {
        v["terms"] = (0..p.terms().len()).map(|i| p.describe_term(i)).collect();
        v["color_name"] = c.color_name(w.color).into();
    }
    Ok(v)
}

pub fn number_json(pattern: &str, k: u32, max_n: u32) -> Result<Value, String> {
    let p = catalog_pattern(pattern).map_err(|e| e.to_string())?;
    let opts = ExtremalOptions {
        max_n: max_n.min(64),
        node_cap: NODE_CAP,
        ..ExtremalOptions::default()
    };
    let out = largest_avoiding(&p, k, Engine::Brute, &opts).map_err(|e| e.to_string())?;
    let mut v = serde_json::to_value(&out).map_err(|e| e.to_string())?;
    if let ExtremalOutcome::Exact(c) = &out {
        v["forcing_n"] = c.forcing_n().into();
    }
    Ok(v)
}

pub fn dx_json(spec: &str, n: u32) -> Result<Value, String> {
    let f = coloring(spec, "n")?;
    match dx_witness_constructive(&f, n, &DxBudget::default()).map_err(|e| e.to_string())? {
        Ok(w) => Ok(json!({ "d": w.d.to_string(), "x": w.x.to_string(), "k": w.k, "c": w.c, "log": w.trace.log() })),
        Err(t) => Ok(json!({ "log": t.log() })),
    }
}

pub fn catalog_json() -> Value {
    let entries = |v: Vec<(&str, &str)>| -> Vec<Value> {
        v.into_iter().map(|(n, d)| json!({ "name": n, "description": d })).collect()
    };
    json!({ "patterns": entries(catalog_patterns()), "colorings": entries(catalog_colorings()) })
}

/// First monochromatic instance within the bound (integer range `1..=bound`
/// on `n`, size bound on the rationals).
#[wasm_bindgen]
pub fn search(pattern: &str, coloring: &str, domain: &str, bound: u32, distinct: bool) -> String {
    respond(search_json(pattern, coloring, domain, bound, distinct))
}

/// Largest `N` with a `k`-coloring of `[1..N]` avoiding the pattern.
#[wasm_bindgen]
pub fn number(pattern: &str, k: u32, max_n: u32) -> String {
    respond(number_json(pattern, k, max_n))
}

#[wasm_bindgen]
pub fn dx_trace(coloring: &str, n: u32) -> String {
    respond(dx_json(coloring, n))
}

#[wasm_bindgen]
pub fn catalog() -> String {
    catalog_json().to_string()
}
