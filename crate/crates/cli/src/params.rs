// Copyright 2026 Zenoprobe Contributors
// SPDX-License-Identifier: Apache-2.0

//! Shared two-level model parameters: resolution from flags and config
//! file, validation, and model construction. All rates and frequencies
//! are in units of the declared reference frequency; times are in its
//! inverse.

use serde::Serialize;
use zenoprobe::lindblad::LindbladModel;

use crate::support::{CliError, Ctx, Result};

/// Resolved two-level model parameters.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ModelParams {
    /// Drive strength (Rabi frequency).
    pub omega: f64,
    /// Drive-atom detuning.
    pub delta: f64,
    /// Dephasing rate.
    pub gamma: f64,
    /// Spontaneous-emission rate.
    pub gamma_spont: f64,
}

/// Raw model flags as clap parses them.
#[derive(Debug, Clone, Copy, Default)]
pub struct ModelFlags {
    pub omega: Option<f64>,
    pub delta: Option<f64>,
    pub gamma: Option<f64>,
    pub gamma_spont: Option<f64>,
}

pub fn resolve_model(flags: &ModelFlags, ctx: &Ctx) -> Result<ModelParams> {
    let params = ModelParams {
        omega: ctx.resolve_or(flags.omega, "omega", 1.0)?,
        delta: ctx.resolve_or(flags.delta, "delta", 0.0)?,
        gamma: ctx.resolve_or(flags.gamma, "gamma", 0.0)?,
        gamma_spont: ctx.resolve_or(flags.gamma_spont, "gamma_spont", 0.0)?,
    };
    for (name, v) in [
        ("omega", params.omega),
        ("delta", params.delta),
        ("gamma", params.gamma),
        ("gamma_spont", params.gamma_spont),
    ] {
        if !v.is_finite() {
            return Err(CliError::Config(format!("{name} must be finite, got {v}")));
        }
    }
    for (name, v) in [("gamma", params.gamma), ("gamma_spont", params.gamma_spont)] {
        if v < 0.0 {
            return Err(CliError::Config(format!("{name} must be >= 0, got {v}")));
        }
    }
    Ok(params)
}

impl ModelParams {
    /// Lindblad model at these parameters.
    pub fn build(&self) -> Result<LindbladModel> {
        Ok(zenoprobe::lindblad::two_level_model(
            self.omega,
            self.delta,
            self.gamma,
            self.gamma_spont,
        )?)
    }

    /// Model family over the drive strength, for candidate kernels.
    pub fn family(&self) -> impl Fn(f64) -> zenoprobe::Result<LindbladModel> + '_ {
        move |w| {
            zenoprobe::lindblad::two_level_model(w, self.delta, self.gamma, self.gamma_spont)
        }
    }
}
