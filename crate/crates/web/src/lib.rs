//! Browser bindings. The plain functions are usable from Rust; the
//! `#[wasm_bindgen]` wrappers expose them to JavaScript.

use mqs_core::amplifiers::{default_cutoff, Gain, MeanPhotonFamily, QubitDirection, StateFamily};
use mqs_core::loss::LossSpec;
use mqs_core::metrics::{
    coherent_cutoff, coherent_mqs_distance, coherent_mqs_distance_closed, component_distance_coherent,
    universal_distance,
};
use mqs_core::ofilter::{filtered_distance, ofilter_cutoff, p_filt, FilterSpec, PfiltOn};
use wasm_bindgen::prelude::*;

/// Larger gains take too long to be interactive.
pub const MAX_GAIN: f64 = 1.2;

pub const MAX_KAPPA: u32 = 40;

fn gain(g: f64) -> Result<Gain, String> {
    if !(0.0..=MAX_GAIN).contains(&g) {
        return Err(format!("g must lie in [0, {MAX_GAIN}]"));
    }
    Gain::new(g).map_err(|e| e.to_string())
}

/// Rows `x, D_cat (closed form), D_cat (numeric), D_components` for
/// `x` in `[0, x_max]`, flattened.
pub fn cat_curve(nbar: f64, x_max: f64, points: usize) -> Result<Vec<f64>, String> {
    if !(nbar > 0.0 && nbar <= 50.0) {
        return Err("nbar must lie in (0, 50]".into());
    }
    if !(x_max > 0.0 && x_max <= nbar) || points < 2 {
        return Err("need 0 < x_max ≤ nbar and at least two points".into());
    }
    let cutoff = coherent_cutoff(nbar);
    let mut out = Vec::with_capacity(4 * points);
    for i in 0..points {
        let x = x_max * i as f64 / (points - 1) as f64;
        let r = x / nbar;
        let numeric = coherent_mqs_distance(r, nbar, cutoff).map_err(|e| e.to_string())?;
        out.extend([x, coherent_mqs_distance_closed(r, nbar), numeric.bures, component_distance_coherent(r, nbar)]);
    }
    Ok(out)
}

/// `[D, ⟨n⟩ total, cutoff, trace deficit]` for the universal cloner with
/// reflectivities `r1`, `r2`.
pub fn universal_point(g: f64, r1: f64, r2: f64) -> Result<Vec<f64>, String> {
    let gain = gain(g)?;
    let loss = LossSpec::from_reflectivities(r1, r2).map_err(|e| e.to_string())?;
    let cutoff = default_cutoff(gain, StateFamily::Seeded).map_err(|e| e.to_string())?;
    let d = universal_distance(gain, loss, QubitDirection::H, cutoff).map_err(|e| e.to_string())?;
    Ok(vec![d.bures, MeanPhotonFamily::Universal.mean_photon(gain), cutoff as f64, d.trace_deficit])
}

/// `[P_filt lossless, P_filt lossy, D filtered, D unfiltered, cutoff]` for
/// the O-filter with threshold `kappa` after `x` photons are lost on average.
pub fn ofilter_point(g: f64, kappa: u32, x: f64) -> Result<Vec<f64>, String> {
    let gain = gain(g)?;
    if kappa > MAX_KAPPA {
        return Err(format!("kappa must be at most {MAX_KAPPA}"));
    }
    let nbar = MeanPhotonFamily::UniversalCloningMode.mean_photon(gain);
    if !(0.0..=nbar).contains(&x) {
        return Err(format!("x must lie in [0, {nbar:.3}]"));
    }
    let eta = 1.0 - x / nbar;
    let spec = FilterSpec::new(kappa);
    let cutoff = ofilter_cutoff(gain, kappa).map_err(|e| e.to_string())?;
    let lossless = p_filt(gain, eta, spec, PfiltOn::Lossless, cutoff).map_err(|e| e.to_string())?;
    let filtered = filtered_distance(gain, eta, spec, cutoff).map_err(|e| e.to_string())?;
    let plain = filtered_distance(gain, eta, FilterSpec::new(0), cutoff).map_err(|e| e.to_string())?;
    Ok(vec![lossless, filtered.p_filt_lossy, filtered.distance.bures, plain.distance.bures, cutoff as f64])
}

#[wasm_bindgen(js_name = catCurve)]
pub fn cat_curve_js(nbar: f64, x_max: f64, points: usize) -> Result<Vec<f64>, JsValue> {
    cat_curve(nbar, x_max, points).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = universalPoint)]
pub fn universal_point_js(g: f64, r1: f64, r2: f64) -> Result<Vec<f64>, JsValue> {
    universal_point(g, r1, r2).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = ofilterPoint)]
pub fn ofilter_point_js(g: f64, kappa: u32, x: f64) -> Result<Vec<f64>, JsValue> {
    ofilter_point(g, kappa, x).map_err(|e| JsValue::from_str(&e))
}
