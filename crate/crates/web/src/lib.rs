//! Browser bindings for a few interactive views of the simulator.
//!
//! The plain functions do the work and are usable natively; the
//! `#[wasm_bindgen]` wrappers only translate errors for JavaScript.

use spectrum_auction::agents::Strategy;
use spectrum_auction::channel::{pathloss, RadioParams};
use spectrum_auction::config::{FeeSchedule, Scheme, ScenarioConfig};
use spectrum_auction::sim::run;
use spectrum_auction::valuation::{initial_threshold, RayleighRateCdf};
use wasm_bindgen::prelude::*;

/// Cap so a stray slider value can't hang the tab.
const MAX_HORIZON: u64 = 200_000;

fn single_channel(num_sus: usize, entry_fee: f64, monitor_fee: f64, horizon: u64, seed: u64) -> ScenarioConfig {
    ScenarioConfig {
        num_sus,
        horizon: horizon.min(MAX_HORIZON),
        fees: FeeSchedule::constant(entry_fee, monitor_fee),
        seed,
        ..ScenarioConfig::default()
    }
}

/// Mean utility over SUs at `points` evenly spaced slots, threshold learners
/// first, then myopic bidders: `2 * points` values.
pub fn gamma_traces(
    num_sus: usize,
    entry_fee: f64,
    monitor_fee: f64,
    horizon: u64,
    seed: u64,
    points: usize,
) -> Result<Vec<f64>, String> {
    let cfg = single_channel(num_sus, entry_fee, monitor_fee, horizon, seed);
    cfg.validate().map_err(|e| e.to_string())?;
    let points = points.clamp(2, 2000);
    let mut out = Vec::with_capacity(2 * points);
    for strategy in [Strategy::Threshold, Strategy::Myopic] {
        let series = run(&cfg, &Scheme::uniform(strategy), 0).map_err(|e| e.to_string())?;
        let len = series.len();
        for p in 0..points {
            if len == 0 {
                out.push(1.0);
                continue;
            }
            let t = (p * (len - 1)) / (points - 1);
            let mean = (0..num_sus).map(|i| series.gamma(t, i)).sum::<f64>() / num_sus as f64;
            out.push(mean);
        }
    }
    Ok(out)
}

/// First-slot entry threshold for an SU at `distance` metres from the base
/// station, one value per monitoring fee.
pub fn threshold_curve(
    num_sus: usize,
    entry_fee: f64,
    distance: f64,
    monitor_fees: &[f64],
) -> Result<Vec<f64>, String> {
    let params = RadioParams::default();
    let gain = pathloss(distance, params.pathloss_exponent).map_err(|e| e.to_string())?;
    let cdf = RayleighRateCdf::new(gain, &params);
    monitor_fees
        .iter()
        .map(|&e| initial_threshold(entry_fee, e, num_sus, &cdf).map_err(|e| e.to_string()))
        .collect()
}

/// Multi-channel comparison of channel-selection schemes. Returns
/// `[mean_gamma, jain]` for BCB, GA and NRL in that order.
pub fn compare_schemes(
    num_sus: usize,
    num_channels: usize,
    entry_fee: f64,
    monitor_fee: f64,
    horizon: u64,
    seed: u64,
) -> Result<Vec<f64>, String> {
    let cfg = ScenarioConfig {
        num_channels,
        ..single_channel(num_sus, entry_fee, monitor_fee, horizon, seed)
    };
    cfg.validate().map_err(|e| e.to_string())?;
    let mut out = Vec::with_capacity(6);
    for strategy in [Strategy::Bcb, Strategy::Ga, Strategy::Nrl] {
        let series = run(&cfg, &Scheme::uniform(strategy), 0).map_err(|e| e.to_string())?;
        let gamma = series.final_gamma();
        out.push(gamma.iter().sum::<f64>() / gamma.len() as f64);
        out.push(series.final_jain());
    }
    Ok(out)
}

#[wasm_bindgen(js_name = gammaTraces)]
pub fn gamma_traces_js(
    num_sus: usize,
    entry_fee: f64,
    monitor_fee: f64,
    horizon: u32,
    seed: u32,
    points: usize,
) -> Result<Vec<f64>, JsValue> {
    gamma_traces(num_sus, entry_fee, monitor_fee, horizon.into(), seed.into(), points)
        .map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = thresholdCurve)]
pub fn threshold_curve_js(
    num_sus: usize,
    entry_fee: f64,
    distance: f64,
    monitor_fees: Vec<f64>,
) -> Result<Vec<f64>, JsValue> {
    threshold_curve(num_sus, entry_fee, distance, &monitor_fees).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = compareSchemes)]
pub fn compare_schemes_js(
    num_sus: usize,
    num_channels: usize,
    entry_fee: f64,
    monitor_fee: f64,
    horizon: u32,
    seed: u32,
) -> Result<Vec<f64>, JsValue> {
    compare_schemes(num_sus, num_channels, entry_fee, monitor_fee, horizon.into(), seed.into())
        .map_err(|e| JsValue::from_str(&e))
}
