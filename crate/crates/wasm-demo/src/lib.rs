//! Browser bindings for three interactive views of the repeater model:
//! `L*` against `q`, purification failure against the raw pair count, and
//! the per-code summary table.
//!
//! The plain functions do the work and are tested natively; the
//! `#[wasm_bindgen]` wrappers only convert errors for JavaScript.

use repeater_core::chain::{code_max_connections, table1_report};
use repeater_core::codes::{build_code, CODE_NAMES};
use repeater_core::purification::{failure_probability, purification_schedule, required_pairs};
use wasm_bindgen::prelude::*;

/// Interleaved `[q0, L0, q1, L1, ...]` over a log grid from `q_min` to `q_max`.
pub fn lstar_points(
    code: &str,
    q_min: f64,
    q_max: f64,
    points: usize,
    f_star: f64,
) -> Result<Vec<f64>, String> {
    if !(q_min > 0.0 && q_min < q_max && q_max <= 1.0) || points < 2 {
        return Err("need 0 < q_min < q_max <= 1 and at least 2 points".into());
    }
    let code = build_code(code).map_err(|e| e.to_string())?;
    let (a, b) = (q_min.ln(), q_max.ln());
    let mut out = Vec::with_capacity(2 * points);
    for i in 0..points {
        let q = (a + (b - a) * i as f64 / (points - 1) as f64).exp();
        let l = code_max_connections(&code, q, f_star).map_err(|e| e.to_string())?;
        out.extend([q, l]);
    }
    Ok(out)
}

/// Interleaved `[N0, P_fail, ...]` from just below `n * 2^levels` up to
/// `ratio_max * n`.
pub fn pfail_points(
    n: u64,
    f0: f64,
    beta: f64,
    delta: f64,
    levels: usize,
    ratio_max: u64,
) -> Result<Vec<f64>, String> {
    if n == 0 || levels == 0 || levels > 6 || ratio_max > 200 {
        return Err("need n >= 1, 1 <= levels <= 6 and ratio_max <= 200".into());
    }
    let sched = purification_schedule(f0, beta, delta, levels).map_err(|e| e.to_string())?;
    let mut out = Vec::new();
    for n0 in (n << levels) - 1..=n * ratio_max {
        let p = failure_probability(n0, n, &sched.success, levels).map_err(|e| e.to_string())?;
        out.extend([n0 as f64, p]);
    }
    Ok(out)
}

pub fn min_pairs(
    n: u64,
    f0: f64,
    beta: f64,
    delta: f64,
    levels: usize,
    target: f64,
) -> Result<u64, String> {
    let sched = purification_schedule(f0, beta, delta, levels).map_err(|e| e.to_string())?;
    required_pairs(n, &sched.success, levels, target).map_err(|e| e.to_string())
}

pub fn table1_text(q: f64, f_star: f64, l0_km: f64) -> Result<String, String> {
    let rows = table1_report(q, f_star, l0_km).map_err(|e| e.to_string())?;
    let mut s = String::from("code,n,k,t,qubits_per_station,Q,L_star,distance_km\n");
    for r in rows {
        s.push_str(&format!(
            "{},{},{},{},{},{:.5e},{:.5e},{:.5e}\n",
            r.code, r.n, r.k, r.t, r.resources, r.logical_error, r.max_connections, r.distance_km
        ));
    }
    Ok(s)
}

#[wasm_bindgen]
pub fn code_names() -> Vec<String> {
    CODE_NAMES.iter().map(|s| s.to_string()).collect()
}

#[wasm_bindgen]
pub fn lstar_curve(
    code: &str,
    q_min: f64,
    q_max: f64,
    points: usize,
    f_star: f64,
) -> Result<Vec<f64>, JsError> {
    lstar_points(code, q_min, q_max, points, f_star).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn pfail_curve(
    n: u32,
    f0: f64,
    beta: f64,
    delta: f64,
    levels: u32,
    ratio_max: u32,
) -> Result<Vec<f64>, JsError> {
    pfail_points(n as u64, f0, beta, delta, levels as usize, ratio_max as u64)
        .map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn required_raw_pairs(
    n: u32,
    f0: f64,
    beta: f64,
    delta: f64,
    levels: u32,
    target: f64,
) -> Result<u32, JsError> {
    min_pairs(n as u64, f0, beta, delta, levels as usize, target)
        .map(|v| v as u32)
        .map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn table1_csv(q: f64, f_star: f64, l0_km: f64) -> Result<String, JsError> {
    table1_text(q, f_star, l0_km).map_err(|e| JsError::new(&e))
}
