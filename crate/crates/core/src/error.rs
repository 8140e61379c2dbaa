// Copyright 2026 Zenoprobe Contributors
// SPDX-License-Identifier: Apache-2.0

//! Error type shared by all modules of this crate.

use thiserror::Error;

/// Errors surfaced by construction, propagation, estimation, and planning.
#[derive(Debug, Error)]
pub enum Error {
    /// A scalar parameter is outside its documented domain.
    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// Matrix or vector dimensions do not agree.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A matrix entry is NaN or infinite.
    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),

    /// A density operator failed a physicality check.
    #[error("not a density operator: {0}")]
    NotDensity(String),

    /// Projectors supplied as a measurement basis are not orthogonal,
    /// not idempotent, or do not resolve the identity.
    #[error("invalid measurement basis: {0}")]
    InvalidBasis(String),

    /// An iterative routine exhausted its iteration budget.
    #[error("{what} did not converge within {limit} iterations")]
    NoConvergence { what: &'static str, limit: usize },

    /// Conditioning on an outcome of probability zero.
    #[error("cannot condition on zero-probability outcome {label}")]
    ZeroProbabilityOutcome { label: String },

    /// The transition kernel has more than one stationary distribution.
    #[error("stationary distribution is not unique (eigenspace dimension {dim})")]
    AmbiguousStationary { dim: usize },

    /// Fisher information diverges (an outcome probability hits 0 or 1
    /// while its parameter derivative stays finite).
    #[error("divergent Fisher information at p = {p}")]
    DivergentInformation { p: f64 },

    /// A closed-form expression was requested outside its regime.
    #[error("closed form unavailable: {0}")]
    UnsupportedClosedForm(String),

    /// Short-interval expansion requested outside its validity window.
    #[error("short-interval expansion invalid: |a| tau + |b| tau^2 = {magnitude} >= 0.1")]
    OutsideExpansionRegime { magnitude: f64 },

    /// A recorded outcome has zero likelihood under every candidate.
    #[error("record impossible under every candidate at step {step}")]
    ImpossibleRecord { step: usize },

    /// A measurement schedule does not cover the supplied record.
    #[error("schedule covers {scheduled} outcomes but record holds {recorded}")]
    ScheduleMismatch { scheduled: usize, recorded: usize },

    /// No measurement plan fits inside the total-time budget.
    #[error("no feasible plan: {0}")]
    InfeasiblePlan(String),

    /// Two supposedly equivalent computations disagree beyond tolerance.
    #[error("consistency check failed for {what}: deviation {deviation:e}")]
    Inconsistency { what: &'static str, deviation: f64 },
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
