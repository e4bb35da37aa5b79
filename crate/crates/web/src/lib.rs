//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Every export takes plain numbers and returns a JSON string; errors come
//! back as exceptions carrying the validation message. The `*_json`
//! functions are the same operations without the JS boundary.

use corrsv::simulate::{self, Init};
use corrsv::{moments, ModelKind, ModelParams, SimConfig};
use serde::Serialize;
use wasm_bindgen::prelude::*;

fn params(model: &str, alpha: f64, phi: f64, sigma: f64, rho: f64) -> corrsv::Result<ModelParams> {
    let kind: ModelKind = model.parse()?;
    let rho = if kind == ModelKind::Classical { 0.0 } else { rho };
    ModelParams::new(kind, alpha, phi, sigma, rho)
}

#[derive(Serialize)]
struct Profile {
    params: ModelParams,
    moments: corrsv::MomentSet,
    leadlag: corrsv::LeadLagProfile,
}

/// Moments and lead-lag correlations up to `k_max`.
pub fn profile_json(model: &str, alpha: f64, phi: f64, sigma: f64, rho: f64, k_max: usize) -> corrsv::Result<String> {
    let p = params(model, alpha, phi, sigma, rho)?;
    let out = Profile {
        params: p,
        moments: moments::moment_set(&p),
        leadlag: moments::leadlag(&p, k_max.min(200)),
    };
    Ok(serde_json::to_string(&out).expect("plain data serializes"))
}

#[derive(Serialize)]
struct Path {
    h0: f64,
    r: Vec<f64>,
    h: Vec<f64>,
}

/// One simulated path `{h0, r, h}` started from the stationary law.
pub fn path_json(
    model: &str,
    alpha: f64,
    phi: f64,
    sigma: f64,
    rho: f64,
    horizon: usize,
    seed: u64,
) -> corrsv::Result<String> {
    let p = params(model, alpha, phi, sigma, rho)?;
    let cfg = SimConfig {
        n_paths: 1,
        horizon: horizon.clamp(1, 100_000),
        seed,
        init: Init::Stationary,
    };
    let pair = simulate::simulate_path(&p, &cfg)?;
    let out = Path {
        h0: pair.t0_state,
        h: pair.volatility.unwrap_or_default(),
        r: pair.returns,
    };
    Ok(serde_json::to_string(&out).expect("plain data serializes"))
}

#[derive(Serialize)]
struct CurvePoint {
    rho: f64,
    mu: f64,
    variance: f64,
    skewness: f64,
    kurtosis: f64,
    corr_rh: f64,
}

/// Moments of the mean-corrected model as `rho` sweeps `(-1, 1)` on
/// `points` interior nodes.
pub fn rho_curve_json(alpha: f64, phi: f64, sigma: f64, points: usize) -> corrsv::Result<String> {
    let n = points.clamp(2, 2000);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let rho = -1.0 + 2.0 * (i as f64 + 0.5) / n as f64;
        let p = ModelParams::new(ModelKind::MeanCorrected, alpha, phi, sigma, rho)?;
        let m = moments::moment_set(&p);
        out.push(CurvePoint {
            rho,
            mu: m.mu,
            variance: m.variance,
            skewness: m.skewness,
            kurtosis: m.kurtosis,
            corr_rh: moments::leadlag(&p, 0).corr_rh,
        });
    }
    Ok(serde_json::to_string(&out).expect("plain data serializes"))
}

fn js(r: corrsv::Result<String>) -> Result<String, JsError> {
    r.map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen]
pub fn profile(model: &str, alpha: f64, phi: f64, sigma: f64, rho: f64, k_max: usize) -> Result<String, JsError> {
    js(profile_json(model, alpha, phi, sigma, rho, k_max))
}

#[wasm_bindgen]
pub fn path(
    model: &str,
    alpha: f64,
    phi: f64,
    sigma: f64,
    rho: f64,
    horizon: usize,
    seed: u32,
) -> Result<String, JsError> {
    js(path_json(model, alpha, phi, sigma, rho, horizon, seed as u64))
}

#[wasm_bindgen]
pub fn rho_curve(alpha: f64, phi: f64, sigma: f64, points: usize) -> Result<String, JsError> {
    js(rho_curve_json(alpha, phi, sigma, points))
}
