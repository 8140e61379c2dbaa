// Copyright 2026 Zenoprobe Contributors
// SPDX-License-Identifier: Apache-2.0

//! Command-line front end for the measurement-statistics library:
//! trajectory simulation, Fisher-information scans, Bayesian frequency
//! estimation, and short-interval survival analysis.
//!
//! All frequencies and rates are in units of a declared reference
//! frequency; times are in its inverse. Every command writes its data
//! files plus a `manifest.json` holding the resolved configuration,
//! seed, and verbatim command line, sufficient to reproduce the data
//! files byte for byte.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numeric or
//! simulation failure, 4 a record impossible under every candidate.

// Negated float comparisons like `!(x > 0.0)` are deliberate: they
// reject NaN together with the out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod cmd_bayes;
mod cmd_fisher;
mod cmd_trajectory;
mod cmd_zeno;
mod params;
mod support;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use params::ModelFlags;
use support::{resolve_out_dir, Ctx};

#[derive(Parser)]
#[command(
    name = "zenoprobe",
    version,
    about = "Projective-measurement statistics, Fisher information, and Bayesian frequency estimation for a driven two-level system",
    after_help = "Config file: flat `key = value` lines (# comments); command-line flags \
                  override file values. Default output directory comes from --out, the \
                  config file, or $ZENOPROBE_OUT."
)]
struct Cli {
    /// Flat key = value config file; flags override file values.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Output directory (default: $ZENOPROBE_OUT or ./out).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Seed for the deterministic random stream.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Drive strength (Rabi frequency), in reference units.
    #[arg(long, global = true)]
    omega: Option<f64>,
    /// Drive-atom detuning.
    #[arg(long, global = true)]
    delta: Option<f64>,
    /// Dephasing rate.
    #[arg(long, global = true)]
    gamma: Option<f64>,
    /// Spontaneous-emission rate.
    #[arg(long, global = true, value_name = "RATE")]
    gamma_spont: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate repeated projective measurements; write population
    /// curves and outcome records per interval duration.
    Trajectory {
        /// Comma-separated interval durations.
        #[arg(long)]
        tau: Option<String>,
        /// Measurements per interval duration.
        #[arg(long)]
        n: Option<usize>,
        /// Population samples per interval (0 disables curves).
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Fisher information: interval scan, (gamma, tau) map with ridge,
    /// or accumulated-information growth versus total time.
    Fisher {
        /// scan, map, or growth.
        #[arg(long)]
        mode: Option<String>,
        /// Smallest interval in the scan grid.
        #[arg(long)]
        tau_min: Option<f64>,
        /// Largest interval in the scan grid.
        #[arg(long)]
        tau_max: Option<f64>,
        /// Grid points (scan/map: interval grid; growth: time grid).
        #[arg(long)]
        points: Option<usize>,
        /// Smallest dephasing rate (map mode).
        #[arg(long)]
        gamma_min: Option<f64>,
        /// Largest dephasing rate (map mode).
        #[arg(long)]
        gamma_max: Option<f64>,
        /// Dephasing grid points (map mode).
        #[arg(long)]
        gamma_points: Option<usize>,
        /// Comma-separated interval durations (growth mode).
        #[arg(long)]
        tau: Option<String>,
        /// Total probing time budget (growth mode).
        #[arg(long)]
        total_time: Option<f64>,
    },
    /// Bayesian grid filter over candidate drive strengths.
    Bayes {
        /// Lower edge of the uniform candidate grid.
        #[arg(long)]
        grid_min: Option<f64>,
        /// Upper edge of the uniform candidate grid.
        #[arg(long)]
        grid_max: Option<f64>,
        /// Points in the uniform candidate grid.
        #[arg(long)]
        grid_points: Option<usize>,
        /// Explicit comma-separated candidate list (replaces the grid).
        #[arg(long)]
        candidates: Option<String>,
        /// Explicit schedule `tau:count[,tau:count...]`.
        #[arg(long)]
        schedule: Option<String>,
        /// Plan a coarse-then-optimal schedule from total_time.
        #[arg(long)]
        hybrid: bool,
        /// Total probing time budget (hybrid planning).
        #[arg(long)]
        total_time: Option<f64>,
        /// Planning guess for the drive strength (default: grid midpoint).
        #[arg(long)]
        guess: Option<f64>,
        /// Largest candidate the planner must separate (default: grid max).
        #[arg(long)]
        omega_max: Option<f64>,
        /// Planning margin in radians.
        #[arg(long)]
        eta: Option<f64>,
        /// Load this record JSON instead of simulating.
        #[arg(long, value_name = "FILE")]
        record: Option<PathBuf>,
    },
    /// Short-interval survival coefficients and effective decay rates.
    Zeno {
        /// Initial state: g or e.
        #[arg(long)]
        rho0: Option<String>,
        /// Comma-separated interval durations for the rate table.
        #[arg(long)]
        tau: Option<String>,
        /// Also simulate a record and report the empirical flip rate.
        #[arg(long)]
        empirical: bool,
        /// Interval for the empirical record.
        #[arg(long)]
        empirical_tau: Option<f64>,
        /// Measurements in the empirical record.
        #[arg(long)]
        n: Option<usize>,
    },
}

fn run(cli: Cli) -> support::Result<()> {
    let ctx = Ctx::load(cli.config.as_deref())?;
    let out_dir = resolve_out_dir(cli.out.clone(), &ctx);
    let flags = ModelFlags {
        omega: cli.omega,
        delta: cli.delta,
        gamma: cli.gamma,
        gamma_spont: cli.gamma_spont,
    };
    match cli.command {
        Command::Trajectory { tau, n, samples } => {
            let cfg = cmd_trajectory::resolve(&flags, &ctx, tau, n, samples, cli.seed)?;
            cmd_trajectory::run(&cfg, &out_dir)
        }
        Command::Fisher {
            mode,
            tau_min,
            tau_max,
            points,
            gamma_min,
            gamma_max,
            gamma_points,
            tau,
            total_time,
        } => {
            let cfg = cmd_fisher::resolve(
                &flags, &ctx, mode, tau_min, tau_max, points, gamma_min, gamma_max,
                gamma_points, tau, total_time,
            )?;
            cmd_fisher::run(&cfg, &out_dir)
        }
        Command::Bayes {
            grid_min,
            grid_max,
            grid_points,
            candidates,
            schedule,
            hybrid,
            total_time,
            guess,
            omega_max,
            eta,
            record,
        } => {
            let cfg = cmd_bayes::resolve(
                &flags, &ctx, grid_min, grid_max, grid_points, candidates, schedule,
                hybrid, total_time, guess, omega_max, eta, record, cli.seed,
            )?;
            cmd_bayes::run(&cfg, &out_dir)
        }
        Command::Zeno {
            rho0,
            tau,
            empirical,
            empirical_tau,
            n,
        } => {
            let cfg = cmd_zeno::resolve(
                &flags, &ctx, rho0, tau, empirical, empirical_tau, n, cli.seed,
            )?;
            cmd_zeno::run(&cfg, &out_dir)
        }
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {}", e.message());
        std::process::exit(e.exit_code());
    }
}
