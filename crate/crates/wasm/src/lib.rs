//! Browser bindings for the measurement-statistics library.
//!
//! Every exported function returns a JSON string so the page's JavaScript
//! can parse one payload per call and draw it on a canvas.  The numerical
//! work lives in `_impl` functions that compile and test on any target;
//! the `#[wasm_bindgen]` wrappers only stringify results and map errors
//! onto JavaScript values.
//!
//! Exposed operations:
//! - [`trajectory_json`]: simulate repeated projective measurements on the
//!   driven two-level system and return the inter-measurement population
//!   curves plus the outcome record.
//! - [`fisher_scan_json`]: scan the Fisher information per measurement and
//!   per unit time over a grid of interval durations and report the
//!   refined per-time optimum.
//! - [`estimation_demo_json`]: under one total-time budget, contrast a
//!   single-interval measurement schedule (aliased, multimodal posterior)
//!   with the coarse-then-optimal hybrid schedule (unimodal posterior).

use wasm_bindgen::prelude::*;

use zenoprobe::bayes::{
    plan_hybrid, posterior_stats, run_filter, PosteriorGrid, PosteriorStats,
};
use zenoprobe::fisher::{optimal_tau, scan_fisher};
use zenoprobe::lindblad::{two_level_model, GROUND};
use zenoprobe::measurement::{
    simulate_schedule, simulate_trajectory, MeasurementBasis, MeasurementRecord,
    ScheduleSegment,
};
use zenoprobe::Result;

/// Longest interval the demo scan considers, in units of 1/omega.
const SCAN_TAU_CEILING: f64 = 14.0;

/// Shortest interval the demo scan considers, in units of 1/omega.
const SCAN_TAU_FLOOR: f64 = 0.05;

/// Grid points used when refining the optimal interval for the demo plans.
const SCAN_POINTS: usize = 2000;

fn err_to_js(e: zenoprobe::Error) -> JsValue {
    JsValue::from_str(&e.to_string())
}

fn stats_json(stats: &PosteriorStats, grid: &PosteriorGrid) -> serde_json::Value {
    let peaks: Vec<f64> = stats
        .peak_indices
        .iter()
        .map(|&i| grid.candidates()[i])
        .collect();
    serde_json::json!({
        "map": stats.map,
        "mean": stats.mean,
        "variance": stats.variance,
        "peaks": peaks,
    })
}

fn schedule_json(schedule: &[ScheduleSegment]) -> serde_json::Value {
    serde_json::json!(schedule
        .iter()
        .map(|s| serde_json::json!({"tau": s.tau, "count": s.count}))
        .collect::<Vec<_>>())
}

#[allow(clippy::too_many_arguments)]
fn trajectory_impl(
    omega: f64,
    delta: f64,
    gamma: f64,
    gamma_spont: f64,
    tau: f64,
    count: usize,
    samples_per_interval: usize,
    seed: u64,
) -> Result<serde_json::Value> {
    let model = two_level_model(omega, delta, gamma, gamma_spont)?;
    let basis = MeasurementBasis::two_level();
    let (record, samples) =
        simulate_trajectory(&model, &basis, tau, count, seed, samples_per_interval)?;
    let times: Vec<f64> = samples.iter().map(|s| s.time).collect();
    let ground: Vec<f64> = samples.iter().map(|s| s.populations[0]).collect();
    let excited: Vec<f64> = samples.iter().map(|s| s.populations[1]).collect();
    let outcome_labels: Vec<&str> = record
        .outcomes()
        .iter()
        .map(|&k| record.labels()[k].as_str())
        .collect();
    Ok(serde_json::json!({
        "tau": tau,
        "count": count,
        "seed": seed,
        "flip_fraction": record.flip_fraction(),
        "times": times,
        "ground": ground,
        "excited": excited,
        "outcomes": {
            "times": record.times(),
            "labels": outcome_labels,
            "indices": record.outcomes(),
        },
    }))
}

fn fisher_scan_impl(
    omega: f64,
    delta: f64,
    gamma: f64,
    tau_min: f64,
    tau_max: f64,
    points: usize,
) -> Result<serde_json::Value> {
    let scan = scan_fisher(omega, delta, gamma, (tau_min, tau_max), points)?;
    Ok(serde_json::json!({
        "taus": scan.taus,
        "per_measurement": scan.per_measurement,
        "per_time": scan.per_time,
        "optimal_tau": scan.optimal_tau,
        "optimal_value": scan.optimal_value,
    }))
}

fn estimation_demo_impl(
    total_time: f64,
    gamma: f64,
    truth: f64,
    guess: f64,
    omega_max: f64,
    grid_points: usize,
    seed: u64,
) -> Result<serde_json::Value> {
    let basis = MeasurementBasis::two_level();
    let family = |w: f64| two_level_model(w, 0.0, gamma, 0.0);
    let truth_model = family(truth)?;
    let prior = PosteriorGrid::uniform_range(0.0, omega_max, grid_points)?;

    let run = |schedule: &[ScheduleSegment],
               seed: u64|
     -> Result<(MeasurementRecord, PosteriorGrid, PosteriorStats)> {
        let (record, _) =
            simulate_schedule(&truth_model, &basis, GROUND, schedule, seed, 0)?;
        let history = run_filter(&record, &prior, family, &basis, schedule)?;
        let last = history.last().expect("filter returns prior plus updates").clone();
        let stats = posterior_stats(&last);
        Ok((record, last, stats))
    };

    // Single-interval schedule: spend the whole budget at the per-time
    // optimal interval for the guess.  Aliased amplitudes produce the same
    // stay probability, so the posterior stays multimodal.
    let (tau_opt, _) = optimal_tau(
        guess,
        0.0,
        gamma,
        (SCAN_TAU_FLOOR / guess, SCAN_TAU_CEILING / guess),
        SCAN_POINTS,
    )?;
    let n_single = ((total_time / tau_opt).floor() as usize).max(1);
    let single_schedule = vec![ScheduleSegment {
        tau: tau_opt,
        count: n_single,
    }];
    let (single_record, single_post, single_stats) = run(&single_schedule, seed)?;

    // Hybrid schedule: a planned block of short disambiguating intervals,
    // then the rest of the budget at the optimal interval.
    let plan = plan_hybrid(total_time, gamma, guess, omega_max, None)?;
    let hybrid_schedule = plan.schedule();
    let (hybrid_record, hybrid_post, hybrid_stats) = run(&hybrid_schedule, seed)?;

    Ok(serde_json::json!({
        "truth": truth,
        "guess": guess,
        "total_time": total_time,
        "candidates": prior.candidates(),
        "single": {
            "schedule": schedule_json(&single_schedule),
            "n_measurements": single_record.len(),
            "posterior": single_post.weights(),
            "stats": stats_json(&single_stats, &single_post),
        },
        "hybrid": {
            "plan": {
                "q": plan.q,
                "n_total": plan.n_total,
                "tau_s": plan.tau_s,
                "tau_opt": plan.tau_opt,
                "planned_total_time": plan.total_time(),
            },
            "schedule": schedule_json(&hybrid_schedule),
            "n_measurements": hybrid_record.len(),
            "posterior": hybrid_post.weights(),
            "stats": stats_json(&hybrid_stats, &hybrid_post),
        },
    }))
}

/// Simulates repeated projective measurements on the driven, damped
/// two-level system and returns population curves plus the outcome record
/// as JSON.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn trajectory_json(
    omega: f64,
    delta: f64,
    gamma: f64,
    gamma_spont: f64,
    tau: f64,
    count: usize,
    samples_per_interval: usize,
    seed: u64,
) -> std::result::Result<String, JsValue> {
    trajectory_impl(
        omega,
        delta,
        gamma,
        gamma_spont,
        tau,
        count,
        samples_per_interval,
        seed,
    )
    .map(|v| v.to_string())
    .map_err(err_to_js)
}

/// Scans the Fisher information per measurement and per unit time over a
/// uniform interval grid; returns the curves and the refined per-time
/// optimum as JSON.
#[wasm_bindgen]
pub fn fisher_scan_json(
    omega: f64,
    delta: f64,
    gamma: f64,
    tau_min: f64,
    tau_max: f64,
    points: usize,
) -> std::result::Result<String, JsValue> {
    fisher_scan_impl(omega, delta, gamma, tau_min, tau_max, points)
        .map(|v| v.to_string())
        .map_err(err_to_js)
}

/// Runs the estimation contrast demo: one simulated record under a
/// single-interval schedule and one under the planned coarse-then-optimal
/// hybrid, both filtered on the same amplitude grid; returns both
/// posteriors, their statistics, and the plan as JSON.
#[wasm_bindgen]
pub fn estimation_demo_json(
    total_time: f64,
    gamma: f64,
    truth: f64,
    guess: f64,
    omega_max: f64,
    grid_points: usize,
    seed: u64,
) -> std::result::Result<String, JsValue> {
    estimation_demo_impl(total_time, gamma, truth, guess, omega_max, grid_points, seed)
        .map(|v| v.to_string())
        .map_err(err_to_js)
}
