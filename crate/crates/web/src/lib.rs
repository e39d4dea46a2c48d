//! Browser bindings: three operations returning JSON strings.

use std::sync::Arc;

use pgroup::deriv::derivation_space;
use pgroup::fpmod;
use pgroup::series::series_report;
use pgroup::{catalog, Group};
use wasm_bindgen::prelude::*;

/// Groups larger than this are refused in the browser.
const WEB_CAP: u128 = 3u128.pow(7);

fn load(name: &str) -> Result<Group, String> {
    let pres = catalog::parse(name).map_err(|e| e.to_string())?;
    Group::with_cap(Arc::new(pres), WEB_CAP).map_err(|e| e.to_string())
}

pub fn series_json(name: &str) -> Result<String, String> {
    let g = load(name)?;
    serde_json::to_string_pretty(&series_report(&g)).map_err(|e| e.to_string())
}

pub fn h1_json(name: &str, module: &str) -> Result<String, String> {
    let g = load(name)?;
    let m = fpmod::module_from_spec(&g, module).map_err(|e| e.to_string())?;
    let dims = derivation_space(&m).map_err(|e| e.to_string())?.dims();
    serde_json::to_string_pretty(&dims).map_err(|e| e.to_string())
}

pub fn noninner_json(name: &str) -> Result<String, String> {
    let g = load(name)?;
    let out = pgroup::autom::construct_noninner(&g).map_err(|e| e.to_string())?;
    let mut v = serde_json::to_value(&out.certificate).map_err(|e| e.to_string())?;
    v["trace"] = serde_json::json!(out.trace);
    serde_json::to_string_pretty(&v).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn series(name: &str) -> Result<String, JsValue> {
    series_json(name).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn h1(name: &str, module: &str) -> Result<String, JsValue> {
    h1_json(name, module).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn noninner(name: &str) -> Result<String, JsValue> {
    noninner_json(name).map_err(|e| JsValue::from_str(&e))
}
