//! wasm-bindgen entry points. Every function takes model text and returns a
//! JSON string; failures come back as `{"error": "..."}`.

use serde::Serialize;
use serde_json::json;
use wasm_bindgen::prelude::*;

use seqtc_core::genfun::series;
use seqtc_core::invariants::{tc_sandwich, SandwichOptions};
use seqtc_core::model::ModelFile;

const FIXTURES: [(&str, &str); 6] = [
    ("ky", include_str!("../../../models/ky.model")),
    ("not_tncz", include_str!("../../../models/not_tncz.model")),
    ("stiefel_n2", include_str!("../../../models/stiefel_n2.model")),
    ("hyperbolic_truncated", include_str!("../../../models/hyperbolic_truncated.model")),
    ("odd_sphere_point", include_str!("../../../models/odd_sphere_point.model")),
    ("s4_point", include_str!("../../../models/s4_point.model")),
];

fn respond<T: Serialize>(r: Result<T, String>) -> String {
    match r {
        Ok(v) => serde_json::to_string(&v).expect("reports serialize"),
        Err(e) => json!({ "error": e }).to_string(),
    }
}

fn parse(text: &str) -> Result<ModelFile, String> {
    ModelFile::parse(text).map_err(|e| e.to_string())
}

/// Names of the bundled models.
#[wasm_bindgen]
pub fn fixture_names() -> String {
    respond(Ok(FIXTURES.iter().map(|(n, _)| *n).collect::<Vec<_>>()))
}

#[wasm_bindgen]
pub fn fixture(name: &str) -> String {
    FIXTURES.iter().find(|(n, _)| *n == name).map(|(_, t)| t.to_string()).unwrap_or_default()
}

/// Cohomology dimensions and representatives through `max_degree`.
#[wasm_bindgen]
pub fn cohomology(text: &str, max_degree: u32) -> String {
    respond((|| {
        let cdga = parse(text)?.cdga().map_err(|e| e.to_string())?;
        let (window, status) = cdga.window(max_degree, cdga.vanishing_above());
        let rows: Vec<_> = (0..=window)
            .filter_map(|n| {
                let h = cdga.cohomology(n);
                (h.dim() > 0).then(|| {
                    let reps: Vec<String> = h.representatives().iter().map(|p| cdga.gens().format(p)).collect();
                    json!({ "degree": n, "dim": h.dim(), "representatives": reps })
                })
            })
            .collect();
        Ok(json!({ "window": window, "status": status.label(), "rows": rows }))
    })())
}

/// TC_r bounds with provenance; `keep` is a comma-separated list (may be empty).
#[wasm_bindgen]
pub fn tc_bounds(text: &str, r: u32, keep: &str, max_degree: u32) -> String {
    respond((|| {
        let m = parse(text)?;
        let f = m.fibration().map_err(|e| e.to_string())?;
        let keep: Vec<String> = keep.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect();
        let opts = SandwichOptions { keep: (!keep.is_empty()).then_some(keep), ..Default::default() };
        tc_sandwich(&f, r, max_degree, &m.assertions, &opts).map_err(|e| e.to_string())
    })())
}

/// Series `Σ TC_{r+1} z^r` for `r = 1..=rmax` and its fit.
#[wasm_bindgen]
pub fn tc_series(text: &str, rmax: u32, max_degree: u32) -> String {
    respond((|| {
        let m = parse(text)?;
        let f = m.fibration().map_err(|e| e.to_string())?;
        series(&f, rmax, |_| max_degree, &m.assertions, &SandwichOptions::default()).map_err(|e| e.to_string())
    })())
}
