//! Browser bindings. Every export returns a JSON string for the page script.

use fcdist::combinatorics::SequenceSpec;
use fcdist::density::{DensityFlag, Family};
use fcdist::figures::{sample_curve, spec_for};
use fcdist::mellin::{compare_with_hypergeometric, oracle_density};
use serde::Serialize;
use wasm_bindgen::prelude::*;

fn family(kind: &str, a: u32, b: u32) -> Result<Family, String> {
    match kind {
        "fc" => Ok(Family::FussCatalan { s: a }),
        "raney" => Ok(Family::Raney { p: a, r: b }),
        _ => Err(format!("unknown family '{kind}' (fc|raney)")),
    }
}

#[derive(Serialize)]
struct CurveData {
    label: String,
    support_upper: f64,
    is_probability: bool,
    x: Vec<f64>,
    y: Vec<f64>,
    extrapolated: Vec<bool>,
}

pub fn density_curve_json(kind: &str, a: u32, b: u32, points: usize) -> Result<String, String> {
    let spec = spec_for(family(kind, a, b)?).map_err(|e| e.to_string())?;
    let curve = sample_curve(&spec, 0.0, points.max(2)).map_err(|e| e.to_string())?;
    let data = CurveData {
        label: curve.label,
        support_upper: spec.support_upper,
        is_probability: curve.is_probability,
        x: curve.points.iter().map(|p| p.x).collect(),
        y: curve.points.iter().map(|p| p.density).collect(),
        extrapolated: curve.points.iter().map(|p| p.flag == DensityFlag::Extrapolated).collect(),
    };
    serde_json::to_string(&data).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct OracleData {
    label: String,
    rel_l1_central: f64,
    min_oracle: f64,
    x: Vec<f64>,
    oracle: Vec<f64>,
    series: Vec<f64>,
}

pub fn oracle_comparison_json(kind: &str, a: u32, b: u32, grid: usize) -> Result<String, String> {
    let spec = spec_for(family(kind, a, b)?).map_err(|e| e.to_string())?;
    let oracle = oracle_density(&spec, grid).map_err(|e| e.to_string())?;
    let cmp = compare_with_hypergeometric(&spec, &oracle).map_err(|e| e.to_string())?;
    let data = OracleData {
        label: spec.family.to_string(),
        rel_l1_central: cmp.rel_l1_central,
        min_oracle: cmp.min_oracle,
        x: cmp.rows.iter().map(|r| r.x).collect(),
        oracle: cmp.rows.iter().map(|r| r.oracle).collect(),
        series: cmp.rows.iter().map(|r| r.hypergeom).collect(),
    };
    serde_json::to_string(&data).map_err(|e| e.to_string())
}

pub fn sequence_json(kind: &str, a: u32, b: u32, n_max: u32) -> Result<String, String> {
    let spec = match family(kind, a, b)? {
        Family::FussCatalan { s } => SequenceSpec::fuss_catalan(s),
        Family::Raney { p, r } => SequenceSpec::raney(p, r),
    }
    .map_err(|e| e.to_string())?;
    let terms: Vec<String> = spec.terms(n_max).map_err(|e| e.to_string())?.iter().map(ToString::to_string).collect();
    serde_json::to_string(&terms).map_err(|e| e.to_string())
}

/// `kind` is `"fc"` (`a = s`) or `"raney"` (`a = p`, `b = r`).
#[wasm_bindgen]
pub fn density_curve(kind: &str, a: u32, b: u32, points: usize) -> Result<String, JsError> {
    density_curve_json(kind, a, b, points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn oracle_comparison(kind: &str, a: u32, b: u32, grid: usize) -> Result<String, JsError> {
    oracle_comparison_json(kind, a, b, grid).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn sequence(kind: &str, a: u32, b: u32, n_max: u32) -> Result<String, JsError> {
    sequence_json(kind, a, b, n_max).map_err(|e| JsError::new(&e))
}
