// Copyright 2026 Zenoprobe Contributors
// SPDX-License-Identifier: Apache-2.0

//! `bayes`: grid-filter frequency estimation over a measurement record.
//!
//! The record is either simulated from the configured model or loaded
//! from a `record_*.json` file produced earlier. The candidate set is a
//! uniform grid (`grid_min`, `grid_max`, `grid_points`) or an explicit
//! `candidates` list. The schedule is an explicit `tau:count` list or,
//! with `--hybrid`, planned from the total time budget: a coarse stage
//! that separates aliased candidates followed by measurements at the
//! information-optimal interval.
//!
//! Outputs: `record.csv`/`record.json`, `posterior.csv` (one row per
//! measurement, one column per candidate), `stats.json` (MAP, mean,
//! variance, peaks), and `plan.json` when the schedule was planned. A
//! record no candidate can explain exits with code 4.

use std::path::{Path, PathBuf};

use serde::Serialize;
use zenoprobe::bayes::{
    plan_hybrid, posterior_history_csv, posterior_stats, run_filter, HybridPlan, PosteriorGrid,
};
use zenoprobe::measurement::{
    simulate_schedule, MeasurementBasis, MeasurementRecord, ScheduleSegment,
};

use crate::params::{resolve_model, ModelFlags, ModelParams};
use crate::support::{
    parse_f64_list, parse_schedule, to_json_text, write_manifest, write_output, CliError, Ctx,
    Result,
};

#[derive(Debug, Serialize)]
#[serde(untagged)]
pub enum GridSpec {
    Uniform { min: f64, max: f64, points: usize },
    Explicit { candidates: Vec<f64> },
}

#[derive(Debug, Serialize)]
pub struct HybridRequest {
    pub total_time: f64,
    pub guess: f64,
    pub omega_max: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct BayesConfig {
    #[serde(flatten)]
    pub model: ModelParams,
    pub grid: GridSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schedule: Option<Vec<(f64, usize)>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hybrid: Option<HybridRequest>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub record: Option<PathBuf>,
    pub seed: u64,
}

#[allow(clippy::too_many_arguments)]
pub fn resolve(
    flags: &ModelFlags,
    ctx: &Ctx,
    grid_min: Option<f64>,
    grid_max: Option<f64>,
    grid_points: Option<usize>,
    candidates: Option<String>,
    schedule: Option<String>,
    hybrid: bool,
    total_time: Option<f64>,
    guess: Option<f64>,
    omega_max: Option<f64>,
    eta: Option<f64>,
    record: Option<PathBuf>,
    seed: Option<u64>,
) -> Result<BayesConfig> {
    let model = resolve_model(flags, ctx)?;

    let candidates = ctx.resolve(candidates, "candidates")?;
    let explicit_grid =
        grid_min.is_some() || grid_max.is_some() || grid_points.is_some();
    if candidates.is_some() && explicit_grid {
        return Err(CliError::Config(
            "give either a candidates list or a uniform grid, not both".into(),
        ));
    }
    let grid = match candidates {
        Some(raw) => GridSpec::Explicit {
            candidates: parse_f64_list(&raw, "candidates")?,
        },
        None => {
            let min = ctx.resolve_or(grid_min, "grid_min", 0.0)?;
            let max = ctx.resolve_or(grid_max, "grid_max", 2.5)?;
            let points = ctx.resolve_or(grid_points, "grid_points", 501)?;
            GridSpec::Uniform { min, max, points }
        }
    };
    let (grid_lo, grid_hi) = match &grid {
        GridSpec::Uniform { min, max, .. } => (*min, *max),
        GridSpec::Explicit { candidates } => (
            candidates.iter().copied().fold(f64::INFINITY, f64::min),
            candidates.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        ),
    };

    let record = match record {
        Some(p) => Some(p),
        None => ctx.resolve::<PathBuf>(None, "record")?,
    };
    let schedule_raw = ctx.resolve(schedule, "schedule")?;
    let hybrid = ctx.resolve_switch(hybrid, "hybrid")?;
    let total_time = ctx.resolve(total_time, "total_time")?;

    if let Some(path) = record {
        if schedule_raw.is_some() || hybrid || total_time.is_some() {
            return Err(CliError::Config(
                "a loaded record carries its own schedule; drop schedule/hybrid/total_time"
                    .into(),
            ));
        }
        return Ok(BayesConfig {
            model,
            grid,
            schedule: None,
            hybrid: None,
            record: Some(path),
            seed: ctx.resolve_or(seed, "seed", 0)?,
        });
    }

    let (schedule, hybrid_req) = match (schedule_raw, hybrid) {
        (Some(_), true) => {
            return Err(CliError::Config(
                "give either an explicit schedule or --hybrid, not both".into(),
            ))
        }
        (Some(raw), false) => {
            if total_time.is_some() {
                return Err(CliError::Config(
                    "an explicit schedule fixes the measurement count; \
                     drop total_time (exactly one of the two may be given)"
                        .into(),
                ));
            }
            let segs = parse_schedule(&raw)?;
            (
                Some(segs.iter().map(|s| (s.tau, s.count)).collect()),
                None,
            )
        }
        (None, true) => {
            let total_time = total_time.ok_or_else(|| {
                CliError::Config("--hybrid needs total_time".into())
            })?;
            let guess =
                ctx.resolve_or(guess, "guess", 0.5 * (grid_lo + grid_hi))?;
            let omega_max = ctx.resolve_or(omega_max, "omega_max", grid_hi)?;
            let eta = ctx.resolve(eta, "eta")?;
            (
                None,
                Some(HybridRequest {
                    total_time,
                    guess,
                    omega_max,
                    eta,
                }),
            )
        }
        (None, false) => {
            return Err(CliError::Config(
                "bayes needs a schedule, --hybrid with total_time, or a record file".into(),
            ))
        }
    };

    Ok(BayesConfig {
        model,
        grid,
        schedule,
        hybrid: hybrid_req,
        record: None,
        seed: ctx.resolve_or(seed, "seed", 0)?,
    })
}

fn load_record(path: &Path) -> Result<MeasurementRecord> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        CliError::Config(format!("cannot read record {}: {e}", path.display()))
    })?;
    let v: serde_json::Value = serde_json::from_str(&text).map_err(|e| {
        CliError::Config(format!("record {}: invalid JSON: {e}", path.display()))
    })?;
    let bad = |what: &str| CliError::Config(format!("record {}: {what}", path.display()));
    let labels: Vec<String> = v["labels"]
        .as_array()
        .ok_or_else(|| bad("missing labels"))?
        .iter()
        .map(|l| l.as_str().map(str::to_string))
        .collect::<Option<_>>()
        .ok_or_else(|| bad("labels must be strings"))?;
    let initial_label = v["initial"].as_str().ok_or_else(|| bad("missing initial"))?;
    let initial = labels
        .iter()
        .position(|l| l == initial_label)
        .ok_or_else(|| bad("initial state is not one of the labels"))?;
    let outcomes: Vec<usize> = v["outcomes"]
        .as_array()
        .ok_or_else(|| bad("missing outcomes"))?
        .iter()
        .map(|o| o.as_u64().map(|u| u as usize))
        .collect::<Option<_>>()
        .ok_or_else(|| bad("outcomes must be nonnegative integers"))?;
    let schedule: Vec<ScheduleSegment> = v["schedule"]
        .as_array()
        .ok_or_else(|| bad("missing schedule"))?
        .iter()
        .map(|s| {
            Some(ScheduleSegment {
                tau: s["tau"].as_f64()?,
                count: s["count"].as_u64()? as usize,
            })
        })
        .collect::<Option<_>>()
        .ok_or_else(|| bad("schedule entries need tau and count"))?;
    let seed = v["seed"].as_u64().ok_or_else(|| bad("missing seed"))?;
    Ok(MeasurementRecord::from_outcomes(
        labels, initial, outcomes, schedule, seed,
    )?)
}

pub fn run(cfg: &BayesConfig, out_dir: &Path) -> Result<()> {
    let basis = MeasurementBasis::two_level();

    let prior = match &cfg.grid {
        GridSpec::Uniform { min, max, points } => {
            PosteriorGrid::uniform_range(*min, *max, *points)?
        }
        GridSpec::Explicit { candidates } => PosteriorGrid::uniform(candidates.clone())?,
    };

    // Schedule: planned, explicit, or carried by a loaded record.
    let mut plan: Option<HybridPlan> = None;
    let record = match (&cfg.record, &cfg.schedule, &cfg.hybrid) {
        (Some(path), _, _) => load_record(path)?,
        (None, Some(segs), None) => {
            let schedule: Vec<ScheduleSegment> = segs
                .iter()
                .map(|&(tau, count)| ScheduleSegment { tau, count })
                .collect();
            simulate_schedule(
                &cfg.model.build()?,
                &basis,
                zenoprobe::lindblad::GROUND,
                &schedule,
                cfg.seed,
                0,
            )?
            .0
        }
        (None, None, Some(req)) => {
            let p = plan_hybrid(
                req.total_time,
                cfg.model.gamma,
                req.guess,
                req.omega_max,
                req.eta,
            )?;
            let schedule = p.schedule();
            plan = Some(p);
            simulate_schedule(
                &cfg.model.build()?,
                &basis,
                zenoprobe::lindblad::GROUND,
                &schedule,
                cfg.seed,
                0,
            )?
            .0
        }
        _ => return Err(CliError::Config("no schedule source resolved".into())),
    };

    if let Some(p) = &plan {
        let plan_json = serde_json::json!({
            "plan": p,
            "schedule": p
                .schedule()
                .iter()
                .map(|s| serde_json::json!({"tau": s.tau, "count": s.count}))
                .collect::<Vec<_>>(),
            "planned_total_time": p.total_time(),
        });
        write_output(out_dir, "plan.json", &to_json_text(&plan_json)?)?;
    }

    let history = run_filter(
        &record,
        &prior,
        cfg.model.family(),
        &basis,
        record.schedule(),
    )?;
    let final_posterior = history.last().expect("filter returns prior plus updates");
    let stats = posterior_stats(final_posterior);
    let peak_candidates: Vec<f64> = stats
        .peak_indices
        .iter()
        .map(|&i| final_posterior.candidates()[i])
        .collect();

    write_output(out_dir, "record.csv", &record.to_csv())?;
    write_output(out_dir, "record.json", &to_json_text(&record.to_json())?)?;
    write_output(out_dir, "posterior.csv", &posterior_history_csv(&history)?)?;

    let mut stats_json = serde_json::to_value(&stats)
        .map_err(|e| CliError::Numeric(e.to_string()))?;
    let obj = stats_json.as_object_mut().expect("stats serialize to object");
    obj.insert("peak_candidates".into(), serde_json::json!(peak_candidates));
    obj.insert("n_measurements".into(), serde_json::json!(record.len()));
    obj.insert(
        "schedule".into(),
        serde_json::json!(record
            .schedule()
            .iter()
            .map(|s| serde_json::json!({"tau": s.tau, "count": s.count}))
            .collect::<Vec<_>>()),
    );
    obj.insert("seed".into(), serde_json::json!(record.seed()));
    if let Some(p) = &plan {
        obj.insert(
            "plan".into(),
            serde_json::to_value(p).map_err(|e| CliError::Numeric(e.to_string()))?,
        );
    }
    write_output(out_dir, "stats.json", &to_json_text(&stats_json)?)?;

    write_manifest(
        out_dir,
        "bayes",
        Some(record.seed()),
        serde_json::to_value(cfg).map_err(|e| CliError::Numeric(e.to_string()))?,
    )
}
