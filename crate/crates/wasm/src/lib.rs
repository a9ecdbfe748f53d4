//! Browser bindings: three interactive views of the benchmark set
//! (amplified, maser and optical sources at `N_B = 6250`).
//!
//! Every export returns a JSON string `{"x": [...], "series": [{"id",
//! "y": [...]}]}`.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use qibench_core::homodyne::{roc_homodyne, HomodyneChannel};
use qibench_core::protocols::{benchmark_set, ResolvedScenario};
use qibench_core::qht_asymmetric::{log_grid, roc_from_dv, RocCurve, RocMeta};

type Result<T> = std::result::Result<T, String>;

fn scenarios(n_s: f64, n_a: f64, eta: f64, copies: f64) -> Result<Vec<ResolvedScenario>> {
    if !(1.0..=1e12).contains(&copies) {
        return Err(format!("copies must lie in [1, 1e12], got {copies}"));
    }
    benchmark_set(n_s, n_a, eta, copies.round() as u64)
        .iter()
        .map(|s| s.resolve().map_err(|e| e.to_string()))
        .collect()
}

fn curves_json(grid: &[f64], curves: Vec<(String, Vec<f64>)>) -> String {
    let series: Vec<Value> = curves
        .into_iter()
        .map(|(id, y)| json!({ "id": id, "y": y }))
        .collect();
    json!({ "x": grid, "series": series }).to_string()
}

fn roc_json(grid: &[f64], curves: Vec<(String, RocCurve)>) -> String {
    // log10 of p_md stays finite where p_md underflows
    let curves = curves
        .into_iter()
        .map(|(id, c)| {
            let y = c
                .points
                .iter()
                .map(|p| p.ln_p_md / std::f64::consts::LN_10)
                .collect();
            (id, y)
        })
        .collect();
    curves_json(grid, curves)
}

/// `log10` of the Chernoff-type bound against the number of copies, swept
/// over `points` log-spaced values in `[1, 10^max_log10]`.
pub fn chernoff_curves(
    n_s: f64,
    n_a: f64,
    eta: f64,
    max_log10: f64,
    points: usize,
) -> Result<String> {
    if !(max_log10 > 0.0 && max_log10 <= 12.0) {
        return Err(format!("max_log10 must lie in (0, 12], got {max_log10}"));
    }
    let grid = log_grid(1.0, 10f64.powf(max_log10), points).map_err(|e| e.to_string())?;
    let mut curves = Vec::new();
    for r in scenarios(n_s, n_a, eta, 1.0)? {
        let b = r.closed_qcb().map_err(|e| e.to_string())?;
        let y = grid
            .iter()
            .map(|&m| b.with_copies(m).ln_value / std::f64::consts::LN_10)
            .collect();
        curves.push((r.id().to_string(), y));
    }
    Ok(curves_json(&grid, curves))
}

/// `log10 P_md` of the optimal detector against `P_fa`.
pub fn optimal_roc(n_s: f64, n_a: f64, eta: f64, copies: f64, points: usize) -> Result<String> {
    let grid = log_grid(1e-4, 0.9, points).map_err(|e| e.to_string())?;
    let mut curves = Vec::new();
    for r in scenarios(n_s, n_a, eta, copies)? {
        let dv = r.closed_qre().map_err(|e| e.to_string())?;
        let c = roc_from_dv(dv.d, dv.v, r.copies(), &grid, RocMeta::default())
            .map_err(|e| e.to_string())?;
        curves.push((r.id().to_string(), c));
    }
    Ok(roc_json(&grid, curves))
}

/// `log10 P_md` of the homodyne receiver against `P_fa`.
pub fn homodyne_roc(n_s: f64, n_a: f64, eta: f64, copies: f64, points: usize) -> Result<String> {
    let grid = log_grid(1e-6, 1.0 - 1e-3, points).map_err(|e| e.to_string())?;
    let mut curves = Vec::new();
    for r in scenarios(n_s, n_a, eta, copies)? {
        let ch = HomodyneChannel::from_scenario(&r).map_err(|e| e.to_string())?;
        let c = roc_homodyne(&ch, &grid).map_err(|e| e.to_string())?;
        curves.push((r.id().to_string(), c));
    }
    Ok(roc_json(&grid, curves))
}

#[wasm_bindgen]
pub fn qcb_vs_copies(
    n_s: f64,
    n_a: f64,
    eta: f64,
    max_log10: f64,
) -> std::result::Result<String, JsError> {
    chernoff_curves(n_s, n_a, eta, max_log10, 81).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn roc_optimal(
    n_s: f64,
    n_a: f64,
    eta: f64,
    copies: f64,
) -> std::result::Result<String, JsError> {
    optimal_roc(n_s, n_a, eta, copies, 60).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = roc_homodyne)]
pub fn roc_homodyne_js(
    n_s: f64,
    n_a: f64,
    eta: f64,
    copies: f64,
) -> std::result::Result<String, JsError> {
    homodyne_roc(n_s, n_a, eta, copies, 120).map_err(|e| JsError::new(&e))
}
