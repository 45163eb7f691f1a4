//! Browser entry points. Each exported function has a plain Rust twin in
//! [`demo`] that the native tests call.

use wasm_bindgen::prelude::*;

pub mod demo;

fn to_js(msg: String) -> JsValue {
    JsValue::from_str(&msg)
}

/// Exact and thermodynamic couplings `h_1 ..= h_{N/2}` at field `g`,
/// concatenated: first the exact block, then the thermodynamic one.
#[wasm_bindgen(js_name = couplingProfile)]
pub fn coupling_profile(n: usize, g: f64) -> Result<Vec<f64>, JsValue> {
    demo::coupling_profile(n, g)
        .map(|p| [p.exact, p.thermo].concat())
        .map_err(to_js)
}

/// Final ground-state probability for every truncation range `M = 0 ..= N/2`.
#[wasm_bindgen(js_name = truncationCurve)]
pub fn truncation_curve(n: usize, t_final: f64, g0: f64, gf: f64) -> Result<Vec<f64>, JsValue> {
    demo::truncation_curve(n, t_final, g0, gf).map_err(to_js)
}

/// Instantaneous ground-state probability along a ramp, as `[g0, p0, g1, p1, ...]`.
/// `coupling` is `exact`, `thermo`, `none` or `truncated:M`.
#[wasm_bindgen(js_name = instantTrace)]
pub fn instant_trace(
    n: usize,
    t_final: f64,
    g0: f64,
    gf: f64,
    coupling: &str,
    samples: usize,
) -> Result<Vec<f64>, JsValue> {
    demo::instant_trace(n, t_final, g0, gf, coupling, samples)
        .map(|points| points.into_iter().flat_map(|(g, p)| [g, p]).collect())
        .map_err(to_js)
}
