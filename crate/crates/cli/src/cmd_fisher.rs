// Copyright 2026 Zenoprobe Contributors
// SPDX-License-Identifier: Apache-2.0

//! `fisher`: information-versus-interval data in three modes.
//!
//! * `scan` — `fisher_scan.csv` with columns (tau,
//!   fisher_per_measurement, fisher_per_time) over a uniform interval
//!   grid; the final row is the refined per-time optimum.
//! * `map` — `fisher_map.csv` over a (gamma, tau) grid plus
//!   `fisher_ridge.csv` with the per-time-optimal interval for each
//!   dephasing rate.
//! * `growth` — `fisher_growth.csv`: accumulated information
//!   `floor(T/tau) * F_per_measurement(tau)` versus total time, one
//!   column per interval duration.

use std::path::Path;

use serde::Serialize;
use zenoprobe::fisher::{scan_fisher, two_level_fisher};
use zenoprobe::fmt_g17;

use crate::params::{resolve_model, ModelFlags, ModelParams};
use crate::support::{parse_f64_list, write_manifest, write_output, CliError, Ctx, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FisherMode {
    Scan,
    Map,
    Growth,
}

#[derive(Debug, Serialize)]
pub struct FisherConfig {
    #[serde(flatten)]
    pub model: ModelParams,
    pub mode: FisherMode,
    pub tau_min: f64,
    pub tau_max: f64,
    pub points: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub taus: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub total_time: Option<f64>,
}

#[allow(clippy::too_many_arguments)]
pub fn resolve(
    flags: &ModelFlags,
    ctx: &Ctx,
    mode: Option<String>,
    tau_min: Option<f64>,
    tau_max: Option<f64>,
    points: Option<usize>,
    gamma_min: Option<f64>,
    gamma_max: Option<f64>,
    gamma_points: Option<usize>,
    tau: Option<String>,
    total_time: Option<f64>,
) -> Result<FisherConfig> {
    let model = resolve_model(flags, ctx)?;
    let mode = match ctx
        .resolve(mode, "mode")?
        .unwrap_or_else(|| "scan".to_string())
        .as_str()
    {
        "scan" => FisherMode::Scan,
        "map" => FisherMode::Map,
        "growth" => FisherMode::Growth,
        other => {
            return Err(CliError::Config(format!(
                "mode: expected scan, map, or growth, got `{other}`"
            )))
        }
    };
    let tau_min = ctx.resolve_or(tau_min, "tau_min", 0.05)?;
    let tau_max = ctx.resolve_or(tau_max, "tau_max", 12.0)?;
    let points = ctx.resolve_or(points, "points", 1200)?;
    let mut cfg = FisherConfig {
        model,
        mode,
        tau_min,
        tau_max,
        points,
        gamma_min: None,
        gamma_max: None,
        gamma_points: None,
        taus: None,
        total_time: None,
    };
    match mode {
        FisherMode::Scan => {}
        FisherMode::Map => {
            cfg.gamma_min = Some(ctx.resolve_or(gamma_min, "gamma_min", 0.0)?);
            cfg.gamma_max = Some(ctx.resolve_or(gamma_max, "gamma_max", 1.0)?);
            cfg.gamma_points = Some(ctx.resolve_or(gamma_points, "gamma_points", 21)?);
            let (lo, hi) = (cfg.gamma_min.unwrap(), cfg.gamma_max.unwrap());
            if !(lo >= 0.0 && hi > lo) {
                return Err(CliError::Config(format!(
                    "gamma grid: need 0 <= gamma_min < gamma_max, got ({lo}, {hi})"
                )));
            }
            if cfg.gamma_points.unwrap() < 2 {
                return Err(CliError::Config("gamma_points: need at least 2".into()));
            }
        }
        FisherMode::Growth => {
            let raw = ctx
                .resolve(tau, "tau")?
                .unwrap_or_else(|| "0.3,3.0".to_string());
            let taus = parse_f64_list(&raw, "tau")?;
            if let Some(&bad) = taus.iter().find(|t| !(**t > 0.0)) {
                return Err(CliError::Config(format!(
                    "tau: intervals must be > 0, got {bad}"
                )));
            }
            let total = ctx.resolve(total_time, "total_time")?.ok_or_else(|| {
                CliError::Config("growth mode needs total_time".into())
            })?;
            if !(total > 0.0 && total.is_finite()) {
                return Err(CliError::Config(format!(
                    "total_time: must be finite and > 0, got {total}"
                )));
            }
            cfg.taus = Some(taus);
            cfg.total_time = Some(total);
        }
    }
    Ok(cfg)
}

pub fn run(cfg: &FisherConfig, out_dir: &Path) -> Result<()> {
    let m = &cfg.model;
    match cfg.mode {
        FisherMode::Scan => {
            let scan = scan_fisher(
                m.omega,
                m.delta,
                m.gamma,
                (cfg.tau_min, cfg.tau_max),
                cfg.points,
            )?;
            let mut csv = scan.to_csv();
            // final row: refined optimum (tau*, F/N at tau*, F/T at tau*)
            csv.push_str(&format!(
                "{},{},{}\n",
                fmt_g17(scan.optimal_tau),
                fmt_g17(scan.optimal_value * scan.optimal_tau),
                fmt_g17(scan.optimal_value)
            ));
            write_output(out_dir, "fisher_scan.csv", &csv)?;
        }
        FisherMode::Map => {
            let (glo, ghi, gn) = (
                cfg.gamma_min.unwrap(),
                cfg.gamma_max.unwrap(),
                cfg.gamma_points.unwrap(),
            );
            let mut map_csv =
                String::from("gamma,tau,fisher_per_measurement,fisher_per_time\n");
            let mut ridge_csv = String::from("gamma,tau_star,fisher_per_time_star\n");
            for i in 0..gn {
                let gamma = glo + (ghi - glo) * i as f64 / (gn - 1) as f64;
                let scan = scan_fisher(
                    m.omega,
                    m.delta,
                    gamma,
                    (cfg.tau_min, cfg.tau_max),
                    cfg.points,
                )?;
                for j in 0..scan.taus.len() {
                    map_csv.push_str(&format!(
                        "{},{},{},{}\n",
                        fmt_g17(gamma),
                        fmt_g17(scan.taus[j]),
                        fmt_g17(scan.per_measurement[j]),
                        fmt_g17(scan.per_time[j])
                    ));
                }
                ridge_csv.push_str(&format!(
                    "{},{},{}\n",
                    fmt_g17(gamma),
                    fmt_g17(scan.optimal_tau),
                    fmt_g17(scan.optimal_value)
                ));
            }
            write_output(out_dir, "fisher_map.csv", &map_csv)?;
            write_output(out_dir, "fisher_ridge.csv", &ridge_csv)?;
        }
        FisherMode::Growth => {
            let taus = cfg.taus.as_ref().unwrap();
            let total = cfg.total_time.unwrap();
            let per_meas: Vec<f64> = taus
                .iter()
                .map(|&tau| two_level_fisher(m.omega, m.delta, m.gamma, tau))
                .collect::<zenoprobe::Result<_>>()?;
            let mut csv = String::from("time");
            for &tau in taus {
                csv.push_str(&format!(",f_tau_{}", fmt_g17(tau)));
            }
            csv.push('\n');
            for i in 0..cfg.points {
                let t = total * i as f64 / (cfg.points - 1) as f64;
                csv.push_str(&fmt_g17(t));
                for (k, &tau) in taus.iter().enumerate() {
                    let steps = (t / tau).floor();
                    csv.push(',');
                    csv.push_str(&fmt_g17(steps * per_meas[k]));
                }
                csv.push('\n');
            }
            write_output(out_dir, "fisher_growth.csv", &csv)?;
        }
    }
    write_manifest(
        out_dir,
        "fisher",
        None,
        serde_json::to_value(cfg).map_err(|e| CliError::Numeric(e.to_string()))?,
    )
}
