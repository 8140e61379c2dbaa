// Copyright 2026 Zenoprobe Contributors
// SPDX-License-Identifier: Apache-2.0

//! `zeno`: short-interval survival statistics.
//!
//! Writes `zeno.json` with the survival-expansion coefficients a and b
//! for the configured initial state, the effective decay rate
//! `-tau * b` over an interval list, the predicted per-measurement
//! flip probability `-(a tau + b tau^2)`, and (with `--empirical`) a
//! simulated flip frequency with its binomial standard error.

use std::path::Path;

use serde::Serialize;
use zenoprobe::fisher::zeno_coefficients;
use zenoprobe::lindblad::{DensityOperator, EXCITED, GROUND};
use zenoprobe::measurement::{simulate_schedule, MeasurementBasis, ScheduleSegment};

use crate::params::{resolve_model, ModelFlags, ModelParams};
use crate::support::{parse_f64_list, to_json_text, write_manifest, write_output, CliError, Ctx, Result};

const DEFAULT_TAUS: &str = "0.01,0.02,0.05,0.1,0.2,0.5";

#[derive(Debug, Serialize)]
pub struct ZenoConfig {
    #[serde(flatten)]
    pub model: ModelParams,
    pub rho0: String,
    pub taus: Vec<f64>,
    pub empirical: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub empirical_tau: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    pub seed: u64,
}

#[allow(clippy::too_many_arguments)]
pub fn resolve(
    flags: &ModelFlags,
    ctx: &Ctx,
    rho0: Option<String>,
    tau: Option<String>,
    empirical: bool,
    empirical_tau: Option<f64>,
    n: Option<usize>,
    seed: Option<u64>,
) -> Result<ZenoConfig> {
    let model = resolve_model(flags, ctx)?;
    let rho0 = ctx
        .resolve(rho0, "rho0")?
        .unwrap_or_else(|| "g".to_string());
    if state_index(&rho0).is_none() {
        return Err(CliError::Config(format!(
            "rho0: expected g or e, got `{rho0}`"
        )));
    }
    let raw_taus = ctx
        .resolve(tau, "tau")?
        .unwrap_or_else(|| DEFAULT_TAUS.to_string());
    let taus = parse_f64_list(&raw_taus, "tau")?;
    if let Some(&bad) = taus.iter().find(|t| !(**t > 0.0)) {
        return Err(CliError::Config(format!(
            "tau: intervals must be > 0, got {bad}"
        )));
    }
    let empirical = ctx.resolve_switch(empirical, "empirical")?;
    let (empirical_tau, n) = if empirical {
        let t = ctx.resolve_or(empirical_tau, "empirical_tau", 0.05)?;
        if !(t > 0.0 && t.is_finite()) {
            return Err(CliError::Config(format!(
                "empirical_tau: must be finite and > 0, got {t}"
            )));
        }
        let n = ctx.resolve_or(n, "n", 100_000)?;
        if n == 0 {
            return Err(CliError::Config("n: need at least one measurement".into()));
        }
        (Some(t), Some(n))
    } else {
        (None, None)
    };
    Ok(ZenoConfig {
        model,
        rho0,
        taus,
        empirical,
        empirical_tau,
        n,
        seed: ctx.resolve_or(seed, "seed", 0)?,
    })
}

fn state_index(label: &str) -> Option<usize> {
    match label {
        "g" | "ground" => Some(GROUND),
        "e" | "excited" => Some(EXCITED),
        _ => None,
    }
}

pub fn run(cfg: &ZenoConfig, out_dir: &Path) -> Result<()> {
    let model = cfg.model.build()?;
    let idx = state_index(&cfg.rho0).expect("validated in resolve");
    let rho0 = DensityOperator::basis_state(idx, 2)?;
    let coeffs = zeno_coefficients(&model, &rho0)?;

    let rates: Vec<serde_json::Value> = cfg
        .taus
        .iter()
        .map(|&tau| {
            serde_json::json!({
                "tau": tau,
                "zeno_rate": coeffs.zeno_rate(tau),
                "predicted_flip_probability": -(coeffs.a * tau + coeffs.b * tau * tau),
            })
        })
        .collect();

    let empirical = if cfg.empirical {
        let tau = cfg.empirical_tau.expect("set when empirical");
        let n = cfg.n.expect("set when empirical");
        let basis = MeasurementBasis::two_level();
        let (record, _) = simulate_schedule(
            &model,
            &basis,
            idx,
            &[ScheduleSegment { tau, count: n }],
            cfg.seed,
            0,
        )?;
        let fraction = record.flip_fraction();
        let flips = (fraction * n as f64).round() as u64;
        let stat_error = (fraction * (1.0 - fraction) / n as f64).sqrt();
        serde_json::json!({
            "tau": tau,
            "n": n,
            "flips": flips,
            "flip_fraction": fraction,
            "per_time_rate": fraction / tau,
            "predicted_flip_probability": -(coeffs.a * tau + coeffs.b * tau * tau),
            "statistical_error": stat_error,
        })
    } else {
        serde_json::Value::Null
    };

    let json = serde_json::json!({
        "rho0": cfg.rho0,
        "a": coeffs.a,
        "b": coeffs.b,
        "rates": rates,
        "empirical": empirical,
    });
    write_output(out_dir, "zeno.json", &to_json_text(&json)?)?;
    write_manifest(
        out_dir,
        "zeno",
        cfg.empirical.then_some(cfg.seed),
        serde_json::to_value(cfg).map_err(|e| CliError::Numeric(e.to_string()))?,
    )
}
