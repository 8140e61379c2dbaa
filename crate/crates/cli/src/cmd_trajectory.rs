// Copyright 2026 Zenoprobe Contributors
// SPDX-License-Identifier: Apache-2.0

//! `trajectory`: repeated projective measurements at one or more
//! interval durations, with intra-interval population curves.
//!
//! For interval index `i` the files are `trajectory_<i>.csv` (sampled
//! populations between measurements, including the projection jumps),
//! `record_<i>.csv`, and `record_<i>.json` (the outcome record). Each
//! interval uses the seeded stream `seed + i` so panels are
//! independently reproducible.

use std::path::Path;

use serde::Serialize;
use zenoprobe::fmt_g17;
use zenoprobe::measurement::{simulate_schedule, MeasurementBasis, ScheduleSegment};

use crate::params::{resolve_model, ModelFlags, ModelParams};
use crate::support::{parse_f64_list, write_manifest, write_output, CliError, Ctx, Result};

/// Default interval list: one underdamped, one critical-ish, two
/// strongly inhibited panels.
const DEFAULT_TAUS: &str = "2.5,1.75,0.75,0.25";

#[derive(Debug, Serialize)]
pub struct TrajectoryConfig {
    #[serde(flatten)]
    pub model: ModelParams,
    pub taus: Vec<f64>,
    pub n: usize,
    pub samples_per_interval: usize,
    pub seed: u64,
}

pub fn resolve(
    flags: &ModelFlags,
    ctx: &Ctx,
    tau: Option<String>,
    n: Option<usize>,
    samples: Option<usize>,
    seed: Option<u64>,
) -> Result<TrajectoryConfig> {
    let model = resolve_model(flags, ctx)?;
    let raw_taus = ctx
        .resolve(tau, "tau")?
        .unwrap_or_else(|| DEFAULT_TAUS.to_string());
    let taus = parse_f64_list(&raw_taus, "tau")?;
    if let Some(&bad) = taus.iter().find(|t| !(**t > 0.0)) {
        return Err(CliError::Config(format!(
            "tau: intervals must be > 0, got {bad}"
        )));
    }
    let n = ctx.resolve_or(n, "n", 30)?;
    if n == 0 {
        return Err(CliError::Config("n: need at least one measurement".into()));
    }
    let samples_per_interval = ctx.resolve_or(samples, "samples", 20)?;
    let seed = ctx.resolve_or(seed, "seed", 0)?;
    Ok(TrajectoryConfig {
        model,
        taus,
        n,
        samples_per_interval,
        seed,
    })
}

pub fn run(cfg: &TrajectoryConfig, out_dir: &Path) -> Result<()> {
    let model = cfg.model.build()?;
    let basis = MeasurementBasis::two_level();
    for (i, &tau) in cfg.taus.iter().enumerate() {
        let schedule = [ScheduleSegment { tau, count: cfg.n }];
        let (record, samples) = simulate_schedule(
            &model,
            &basis,
            zenoprobe::lindblad::GROUND,
            &schedule,
            cfg.seed + i as u64,
            cfg.samples_per_interval,
        )?;
        let mut csv = String::from("time");
        for label in basis.labels() {
            csv.push_str(&format!(",p_{label}"));
        }
        csv.push('\n');
        for s in &samples {
            csv.push_str(&fmt_g17(s.time));
            for p in &s.populations {
                csv.push(',');
                csv.push_str(&fmt_g17(*p));
            }
            csv.push('\n');
        }
        write_output(out_dir, &format!("trajectory_{i}.csv"), &csv)?;
        write_output(out_dir, &format!("record_{i}.csv"), &record.to_csv())?;
        write_output(
            out_dir,
            &format!("record_{i}.json"),
            &crate::support::to_json_text(&record.to_json())?,
        )?;
    }
    write_manifest(
        out_dir,
        "trajectory",
        Some(cfg.seed),
        serde_json::to_value(cfg).map_err(|e| CliError::Numeric(e.to_string()))?,
    )
}
