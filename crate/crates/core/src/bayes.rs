//! Grid-based Bayesian inference of a model parameter from projective
//! measurement records.
//!
//! A [`PosteriorGrid`] holds a discrete distribution over candidate parameter
//! values.  Each recorded outcome multiplies every candidate's weight by the
//! transition probability that candidate assigns to the observed jump, then
//! renormalizes ([`bayes_update`]).  Replaying a whole record is
//! [`run_filter`]; kernels are precomputed once per (candidate, interval)
//! pair so repeated filtering over long records stays cheap.
//!
//! Repeated measurement at a single interval cannot distinguish drive
//! amplitudes whose populations realign with the period
//! ([`ambiguous_candidates`]).  The [`plan_hybrid`] scheduler removes that
//! degeneracy with a short coarse interval before spending the remaining
//! time budget at the information-optimal interval.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fisher::optimal_tau;
use crate::fmt_g17;
use crate::lindblad::{DensityOperator, LindbladModel};
use crate::linalg::hermitian_eigenvalues;
use crate::measurement::{
    transition_kernel, MeasurementBasis, MeasurementRecord, ScheduleSegment, TransitionKernel,
};

/// Tolerance on posterior normalization.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;
/// Total-weight threshold below which an update rescales by the maximum
/// weight before normalizing, to keep long records out of the denormal range.
pub const UNDERFLOW_FLOOR: f64 = 1e-300;
/// A local maximum counts as a reported peak when its weight is at least
/// this fraction of the global maximum.
pub const PEAK_FRACTION: f64 = 0.1;
/// Default exclusion margin (radians) for the coarse-interval bound used by
/// [`plan_hybrid`].
pub const DEFAULT_ETA: f64 = 0.01;
/// Default number of grid points for a candidate lattice spanning
/// `[0, omega_max]`.
pub const DEFAULT_GRID_POINTS: usize = 501;
/// Iteration cap for the integer fixed-point searches inside [`plan_hybrid`].
pub const MAX_PLAN_ITERATIONS: usize = 100;

/// Discrete posterior distribution over a strictly increasing candidate grid.
///
/// Weights are kept normalized to unit sum; the constructor normalizes any
/// nonnegative input with positive total.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorGrid {
    candidates: Vec<f64>,
    weights: Vec<f64>,
}

impl PosteriorGrid {
    /// Builds a posterior from candidates and unnormalized nonnegative
    /// weights.  Candidates must be finite and strictly increasing.
    pub fn new(candidates: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if candidates.is_empty() {
            return Err(Error::InvalidParameter {
                name: "candidates",
                reason: "candidate grid must be nonempty".into(),
            });
        }
        if candidates.len() != weights.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} candidates vs {} weights",
                candidates.len(),
                weights.len()
            )));
        }
        if candidates.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("candidate value"));
        }
        if candidates.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter {
                name: "candidates",
                reason: "candidates must be strictly increasing".into(),
            });
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidParameter {
                name: "weights",
                reason: "weights must be finite and nonnegative".into(),
            });
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "weights",
                reason: "total weight must be positive".into(),
            });
        }
        let weights = weights.iter().map(|w| w / total).collect();
        Ok(Self { candidates, weights })
    }

    /// Uniform prior over the given candidates.
    pub fn uniform(candidates: Vec<f64>) -> Result<Self> {
        let n = candidates.len();
        Self::new(candidates, vec![1.0; n.max(1)])
    }

    /// Uniform prior over `points` equally spaced candidates on `[lo, hi]`.
    pub fn uniform_range(lo: f64, hi: f64, points: usize) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() || hi <= lo {
            return Err(Error::InvalidParameter {
                name: "range",
                reason: format!("need finite lo < hi, got [{lo}, {hi}]"),
            });
        }
        if points < 2 {
            return Err(Error::InvalidParameter {
                name: "points",
                reason: format!("need at least 2 grid points, got {points}"),
            });
        }
        let step = (hi - lo) / (points - 1) as f64;
        let candidates = (0..points).map(|i| lo + step * i as f64).collect();
        Self::uniform(candidates)
    }

    /// Candidate values, strictly increasing.
    pub fn candidates(&self) -> &[f64] {
        &self.candidates
    }

    /// Normalized weights, aligned with [`Self::candidates`].
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Number of candidates.
    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    /// True when the grid holds no candidates (never for constructed grids).
    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    /// Grid spacing between the first two candidates (uniform grids only use
    /// this as "one grid step").
    pub fn first_step(&self) -> Option<f64> {
        (self.candidates.len() >= 2).then(|| self.candidates[1] - self.candidates[0])
    }
}

/// Single Bayesian update: multiply each candidate's weight by the
/// probability its kernel assigns to observing `outcome` after `prev`, then
/// renormalize.
///
/// `kernels` must align one-to-one with the posterior's candidates and share
/// one interval.  If every candidate assigns zero probability the record is
/// impossible under the whole grid and an error is returned.  Totals below
/// [`UNDERFLOW_FLOOR`] are rescaled by the maximum weight before normalizing,
/// so chains of very unlikely outcomes cannot underflow to an all-zero state.
pub fn bayes_update(
    posterior: &PosteriorGrid,
    kernels: &[TransitionKernel],
    prev: usize,
    outcome: usize,
) -> Result<PosteriorGrid> {
    if kernels.len() != posterior.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} kernels vs {} candidates",
            kernels.len(),
            posterior.len()
        )));
    }
    let dim = kernels[0].len();
    if kernels.iter().any(|k| k.len() != dim) {
        return Err(Error::DimensionMismatch(
            "kernels must share one outcome space".into(),
        ));
    }
    let tau = kernels[0].tau();
    if kernels.iter().any(|k| k.tau() != tau) {
        return Err(Error::InvalidParameter {
            name: "kernels",
            reason: "kernels must share one measurement interval".into(),
        });
    }
    if prev >= dim || outcome >= dim {
        return Err(Error::InvalidParameter {
            name: "outcome",
            reason: format!("outcome pair ({prev}, {outcome}) out of range {dim}"),
        });
    }
    let mut weights: Vec<f64> = posterior
        .weights
        .iter()
        .zip(kernels)
        .map(|(w, k)| w * k.prob(outcome, prev))
        .collect();
    let max = weights.iter().fold(0.0_f64, |m, w| m.max(*w));
    if max <= 0.0 {
        // Caller (run_filter) rewrites the step index.
        return Err(Error::ImpossibleRecord { step: 0 });
    }
    let total: f64 = weights.iter().sum();
    if total < UNDERFLOW_FLOOR {
        for w in &mut weights {
            *w /= max;
        }
    }
    PosteriorGrid::new(posterior.candidates.clone(), weights)
}

/// Transition kernels precomputed once per (candidate, interval) pair, for
/// replaying records against a candidate grid.
#[derive(Debug, Clone)]
pub struct CandidateKernels {
    candidates: Vec<f64>,
    schedule: Vec<ScheduleSegment>,
    /// Index into `kernels` for each schedule segment (segments sharing an
    /// interval share one kernel set).
    segment_kernel: Vec<usize>,
    /// `kernels[k][i]` is the kernel of candidate `i` at distinct interval `k`.
    kernels: Vec<Vec<TransitionKernel>>,
}

impl CandidateKernels {
    /// Candidate values the kernels were built for.
    pub fn candidates(&self) -> &[f64] {
        &self.candidates
    }

    /// Schedule the kernels were built for.
    pub fn schedule(&self) -> &[ScheduleSegment] {
        &self.schedule
    }

    /// Kernels for one schedule segment, aligned with the candidates.
    pub fn segment_kernels(&self, segment: usize) -> &[TransitionKernel] {
        &self.kernels[self.segment_kernel[segment]]
    }
}

/// Builds the per-candidate transition kernels for every distinct interval
/// in `schedule`.  `family` maps a candidate value to its model.
pub fn candidate_kernels<F>(
    candidates: &[f64],
    family: F,
    basis: &MeasurementBasis,
    schedule: &[ScheduleSegment],
) -> Result<CandidateKernels>
where
    F: Fn(f64) -> Result<LindbladModel>,
{
    if candidates.is_empty() {
        return Err(Error::InvalidParameter {
            name: "candidates",
            reason: "candidate grid must be nonempty".into(),
        });
    }
    let mut taus: Vec<f64> = Vec::new();
    let mut segment_kernel = Vec::with_capacity(schedule.len());
    for seg in schedule {
        let k = taus
            .iter()
            .position(|t| t.to_bits() == seg.tau.to_bits())
            .unwrap_or_else(|| {
                taus.push(seg.tau);
                taus.len() - 1
            });
        segment_kernel.push(k);
    }
    let models: Vec<LindbladModel> = candidates
        .iter()
        .map(|&c| family(c))
        .collect::<Result<_>>()?;
    let mut kernels = Vec::with_capacity(taus.len());
    for &tau in &taus {
        let set: Vec<TransitionKernel> = models
            .iter()
            .map(|m| transition_kernel(m, basis, tau))
            .collect::<Result<_>>()?;
        kernels.push(set);
    }
    Ok(CandidateKernels {
        candidates: candidates.to_vec(),
        schedule: schedule.to_vec(),
        segment_kernel,
        kernels,
    })
}

/// Replays a measurement record through the filter using precomputed
/// kernels.  Returns the posterior after zero measurements (the prior) and
/// after each recorded outcome, in order — `record.len() + 1` entries.
pub fn run_filter_precomputed(
    record: &MeasurementRecord,
    prior: &PosteriorGrid,
    kernels: &CandidateKernels,
) -> Result<Vec<PosteriorGrid>> {
    if kernels.candidates.len() != prior.len()
        || kernels
            .candidates
            .iter()
            .zip(prior.candidates())
            .any(|(a, b)| a != b)
    {
        return Err(Error::DimensionMismatch(
            "precomputed kernels were built for a different candidate grid".into(),
        ));
    }
    let scheduled: usize = kernels.schedule.iter().map(|s| s.count).sum();
    if scheduled != record.len() {
        return Err(Error::ScheduleMismatch {
            scheduled,
            recorded: record.len(),
        });
    }
    let dim = record.labels().len();
    if kernels
        .kernels
        .iter()
        .any(|set| set.iter().any(|k| k.len() != dim))
    {
        return Err(Error::DimensionMismatch(format!(
            "kernels have a different outcome space than the record ({dim} outcomes)"
        )));
    }
    let mut history = Vec::with_capacity(record.len() + 1);
    history.push(prior.clone());
    let mut current = prior.clone();
    let mut prev = record.initial();
    let mut step = 0usize;
    for (s, seg) in kernels.schedule.iter().enumerate() {
        let set = kernels.segment_kernels(s);
        for _ in 0..seg.count {
            let outcome = record.outcomes()[step];
            current = bayes_update(&current, set, prev, outcome).map_err(|e| match e {
                Error::ImpossibleRecord { .. } => Error::ImpossibleRecord { step },
                other => other,
            })?;
            history.push(current.clone());
            prev = outcome;
            step += 1;
        }
    }
    Ok(history)
}

/// Replays a measurement record through the filter, building the
/// per-candidate kernels for `schedule` first.
///
/// The schedule must account for every recorded outcome; the posterior
/// trajectory starts at the prior and has one entry per measurement after
/// that.  An empty record returns just the prior.
pub fn run_filter<F>(
    record: &MeasurementRecord,
    prior: &PosteriorGrid,
    family: F,
    basis: &MeasurementBasis,
    schedule: &[ScheduleSegment],
) -> Result<Vec<PosteriorGrid>>
where
    F: Fn(f64) -> Result<LindbladModel>,
{
    if basis.len() != record.labels().len() {
        return Err(Error::DimensionMismatch(format!(
            "basis has {} outcomes, record has {}",
            basis.len(),
            record.labels().len()
        )));
    }
    let kernels = candidate_kernels(prior.candidates(), family, basis, schedule)?;
    run_filter_precomputed(record, prior, &kernels)
}

/// Summary statistics of a posterior grid.
#[derive(Debug, Clone, Serialize)]
pub struct PosteriorStats {
    /// Maximum-posterior candidate value (ties broken toward the smallest).
    pub map: f64,
    /// Index of the MAP candidate.
    pub map_index: usize,
    /// Posterior mean.
    pub mean: f64,
    /// Posterior variance.
    pub variance: f64,
    /// Indices of local maxima whose weight is at least [`PEAK_FRACTION`] of
    /// the global maximum (plateaus reported once, at their left edge).
    pub peak_indices: Vec<usize>,
}

/// Computes MAP, mean, variance, and the list of significant peaks.
pub fn posterior_stats(posterior: &PosteriorGrid) -> PosteriorStats {
    let c = posterior.candidates();
    let w = posterior.weights();
    let n = c.len();
    let mut map_index = 0usize;
    for i in 1..n {
        if w[i] > w[map_index] {
            map_index = i;
        }
    }
    let mean: f64 = c.iter().zip(w).map(|(ci, wi)| ci * wi).sum();
    let variance: f64 = c
        .iter()
        .zip(w)
        .map(|(ci, wi)| wi * (ci - mean) * (ci - mean))
        .sum();
    let threshold = PEAK_FRACTION * w[map_index];
    let mut peak_indices = Vec::new();
    for i in 0..n {
        if w[i] < threshold {
            continue;
        }
        let rises = i == 0 || w[i] > w[i - 1];
        let falls = i == n - 1 || w[i] >= w[i + 1];
        if rises && falls {
            peak_indices.push(i);
        }
    }
    PosteriorStats {
        map: c[map_index],
        map_index,
        mean,
        variance,
        peak_indices,
    }
}

/// Serializes a posterior trajectory as CSV: one header row listing the
/// candidate values, then one row per entry (row 0 is the prior) with the
/// measurement index followed by the weights.
pub fn posterior_history_csv(history: &[PosteriorGrid]) -> Result<String> {
    let Some(first) = history.first() else {
        return Err(Error::InvalidParameter {
            name: "history",
            reason: "posterior trajectory must be nonempty".into(),
        });
    };
    if history
        .iter()
        .any(|p| p.candidates() != first.candidates())
    {
        return Err(Error::DimensionMismatch(
            "posterior trajectory entries use different candidate grids".into(),
        ));
    }
    let mut out = String::from("step");
    for c in first.candidates() {
        out.push(',');
        out.push_str(&fmt_g17(*c));
    }
    out.push('\n');
    for (i, p) in history.iter().enumerate() {
        out.push_str(&i.to_string());
        for w in p.weights() {
            out.push(',');
            out.push_str(&fmt_g17(*w));
        }
        out.push('\n');
    }
    Ok(out)
}

/// Drive amplitudes that a fixed measurement interval cannot distinguish
/// from `omega0`.
///
/// With generalized frequency `chi = sqrt(omega^2 + gamma^2)`, populations
/// realign whenever `chi * tau = 2 n pi ± chi0 * tau` for integer `n >= 1`.
/// Returns every such amplitude `omega = sqrt(chi^2 - gamma^2)` in
/// `(0, omega_max]`, excluding `omega0` itself and branches with negative
/// radicand, in ascending order.
pub fn ambiguous_candidates(
    omega0: f64,
    gamma: f64,
    tau: f64,
    omega_max: f64,
) -> Result<Vec<f64>> {
    for (name, value) in [
        ("omega0", omega0),
        ("gamma", gamma),
        ("tau", tau),
        ("omega_max", omega_max),
    ] {
        if !value.is_finite() {
            return Err(Error::NonFinite(name));
        }
    }
    if omega0 < 0.0 || gamma < 0.0 {
        return Err(Error::InvalidParameter {
            name: "omega0",
            reason: "omega0 and gamma must be nonnegative".into(),
        });
    }
    if tau <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "tau",
            reason: format!("interval must be positive, got {tau}"),
        });
    }
    if omega_max <= omega0 {
        return Err(Error::InvalidParameter {
            name: "omega_max",
            reason: format!("omega_max {omega_max} must exceed omega0 {omega0}"),
        });
    }
    let chi0 = omega0.hypot(gamma);
    let chi_max = omega_max.hypot(gamma);
    let mut out = Vec::new();
    let mut n = 1u32;
    loop {
        let base = 2.0 * f64::from(n) * PI / tau;
        if base - chi0 > chi_max {
            break;
        }
        for chi in [base - chi0, base + chi0] {
            if chi <= 0.0 || chi > chi_max {
                continue;
            }
            let radicand = chi * chi - gamma * gamma;
            if radicand < 0.0 {
                continue;
            }
            let omega = radicand.sqrt();
            if omega <= 0.0 || omega > omega_max {
                continue;
            }
            if (omega - omega0).abs() <= 1e-12 * chi0.max(1.0) {
                continue;
            }
            out.push(omega);
        }
        n += 1;
        if n > 1_000_000 {
            return Err(Error::NoConvergence {
                what: "ambiguity enumeration",
                limit: 1_000_000,
            });
        }
    }
    out.sort_by(|a, b| a.total_cmp(b));
    out.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * chi0.max(1.0));
    Ok(out)
}

/// Trace norm of the difference of two density operators,
/// `|| rho_a - rho_b ||_1` (sum of absolute eigenvalues of the Hermitian
/// difference).  Ranges from 0 (identical) to 2 (orthogonal pure states).
pub fn state_distance(rho_a: &DensityOperator, rho_b: &DensityOperator) -> Result<f64> {
    if rho_a.dim() != rho_b.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state dimensions {} vs {}",
            rho_a.dim(),
            rho_b.dim()
        )));
    }
    let diff = rho_a.matrix() - rho_b.matrix();
    let eigs = hermitian_eigenvalues(&diff)?;
    Ok(eigs.iter().map(|l| l.abs()).sum())
}

/// A coarse-then-optimal measurement schedule for amplitude estimation under
/// a total-time budget.
///
/// `q` short measurements at `tau_s` rule out aliased amplitudes; the
/// remaining `n_total - q` measurements run at the information-optimal
/// interval `tau_opt`.
#[derive(Debug, Clone, Serialize)]
pub struct HybridPlan {
    /// Number of coarse (disambiguating) measurements.
    pub q: usize,
    /// Total number of measurements.
    pub n_total: usize,
    /// Coarse measurement interval.
    pub tau_s: f64,
    /// Information-optimal measurement interval for the remaining budget.
    pub tau_opt: f64,
    /// Split exponent: `q = ceil(n_total^(1 - epsilon))`.
    pub epsilon: f64,
    /// Trace-distance target separating the guess from its nearest alias
    /// after one coarse interval.
    pub l_distinction: f64,
    /// Exclusion margin (radians) used in the coarse-interval bound.
    pub eta: f64,
}

impl HybridPlan {
    /// The plan as a two-segment schedule: `q` at `tau_s`, then the rest at
    /// `tau_opt`.
    pub fn schedule(&self) -> Vec<ScheduleSegment> {
        vec![
            ScheduleSegment {
                tau: self.tau_s,
                count: self.q,
            },
            ScheduleSegment {
                tau: self.tau_opt,
                count: self.n_total - self.q,
            },
        ]
    }

    /// Total wall-clock time the schedule consumes.
    pub fn total_time(&self) -> f64 {
        self.q as f64 * self.tau_s + (self.n_total - self.q) as f64 * self.tau_opt
    }
}

/// Number of coarse measurements required for a total of `n`:
/// `ceil(n^(1-eps))` with `eps = 1/2 + ln L / ln n`, which reduces to
/// `ceil(sqrt(n) / l)`.  Returns `None` when the count is absurdly large
/// (no feasible plan will use it).
fn coarse_count(n: usize, l: f64) -> Option<usize> {
    let q = ((n as f64).sqrt() / l).ceil();
    (q.is_finite() && q <= 1e12).then_some(q as usize)
}

/// Plans a hybrid schedule for estimating a drive amplitude near
/// `omega0_guess` (prior support `(0, omega_max]`, dephasing rate `gamma`)
/// within total time `total_time`.
///
/// The coarse interval is `tau_s = (2 pi - eta) / (chi_max + chi_0)` with
/// `chi = sqrt(omega^2 + gamma^2)`, short enough that every alias of the
/// guess is pushed out of the prior support (margin `eta`, default
/// [`DEFAULT_ETA`]).  The distinction target `L` is the trace distance,
/// after one coarse interval, between the guess and the amplitude whose
/// ground population moves oppositely (`chi tau_s = pi - chi_0 tau_s`); in
/// the strong-drive regime that distance is `2 |cos(chi_0 tau_s)|`, which is
/// the form used here.  The optimal interval comes from the information-rate
/// maximizer; for `gamma = 0` the rate grows with the interval, so the plan
/// spends all remaining time on a single long measurement.  The measurement
/// count is the largest `n` whose coarse requirement `q = ceil(sqrt(n)/L)`
/// still fits the time budget; no feasible `n >= q + 1` is an error.
pub fn plan_hybrid(
    total_time: f64,
    gamma: f64,
    omega0_guess: f64,
    omega_max: f64,
    eta: Option<f64>,
) -> Result<HybridPlan> {
    let eta = eta.unwrap_or(DEFAULT_ETA);
    for (name, value) in [
        ("total_time", total_time),
        ("gamma", gamma),
        ("omega0_guess", omega0_guess),
        ("omega_max", omega_max),
        ("eta", eta),
    ] {
        if !value.is_finite() {
            return Err(Error::NonFinite(name));
        }
    }
    if total_time <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "total_time",
            reason: format!("time budget must be positive, got {total_time}"),
        });
    }
    if gamma < 0.0 || omega0_guess < 0.0 {
        return Err(Error::InvalidParameter {
            name: "gamma",
            reason: "rates must be nonnegative".into(),
        });
    }
    if omega_max <= omega0_guess {
        return Err(Error::InvalidParameter {
            name: "omega_max",
            reason: format!("omega_max {omega_max} must exceed the guess {omega0_guess}"),
        });
    }
    if !(eta > 0.0 && eta < PI) {
        return Err(Error::InvalidParameter {
            name: "eta",
            reason: format!("exclusion margin must lie in (0, pi), got {eta}"),
        });
    }

    let chi0 = omega0_guess.hypot(gamma);
    let chi_max = omega_max.hypot(gamma);
    let tau_s = (2.0 * PI - eta) / (chi_max + chi0);
    let l_distinction = 2.0 * (chi0 * tau_s).cos().abs();
    if l_distinction < 1e-6 {
        return Err(Error::InfeasiblePlan(format!(
            "distinction target vanishes at the coarse interval \
             (chi0*tau_s = {:.6} is too close to a quarter period)",
            chi0 * tau_s
        )));
    }

    if gamma == 0.0 {
        // Without damping the information rate grows with the interval, so
        // the best use of the leftover budget is one long measurement:
        // n = q + 1 with q at the self-consistent coarse count.
        let mut q = 1usize;
        let mut converged = false;
        for _ in 0..MAX_PLAN_ITERATIONS {
            let next = coarse_count(q + 1, l_distinction).ok_or_else(|| {
                Error::InfeasiblePlan("coarse count overflows any feasible plan".into())
            })?;
            if next == q {
                converged = true;
                break;
            }
            q = next;
        }
        if !converged {
            return Err(Error::NoConvergence {
                what: "coarse-count fixed point",
                limit: MAX_PLAN_ITERATIONS,
            });
        }
        let tau_opt = total_time - q as f64 * tau_s;
        if tau_opt <= 0.0 {
            return Err(Error::InfeasiblePlan(format!(
                "{q} coarse measurements at interval {tau_s:.6} already exceed \
                 the time budget {total_time}"
            )));
        }
        let n_total = q + 1;
        let epsilon = 0.5 + l_distinction.ln() / (n_total as f64).ln();
        return Ok(HybridPlan {
            q,
            n_total,
            tau_s,
            tau_opt,
            epsilon,
            l_distinction,
            eta,
        });
    }

    // Damped case: locate the interior information-rate maximum.  The rate
    // envelope decays like exp(-2*gamma*tau), so maxima beyond a few
    // damping times are strictly dominated; cap the scan there.
    let hi = (6.0 / gamma).min(total_time);
    let lo = hi * 1e-4;
    let scale = omega0_guess.max(gamma);
    let points = ((12.0 * hi * scale / PI).ceil() as usize).clamp(1200, 20_000);
    let (tau_opt, _) = optimal_tau(omega0_guess, 0.0, gamma, (lo, hi), points)?;

    // Largest total count whose coarse requirement still fits the budget.
    let n_hi = (total_time / tau_s.min(tau_opt)).ceil() as usize + 1;
    let mut best: Option<(usize, usize)> = None;
    for n in 2..=n_hi.max(2) {
        let Some(q) = coarse_count(n, l_distinction) else {
            continue;
        };
        if q + 1 > n {
            continue;
        }
        let cost = q as f64 * tau_s + (n - q) as f64 * tau_opt;
        if cost <= total_time {
            best = Some((n, q));
        }
    }
    let Some((n_total, q)) = best else {
        return Err(Error::InfeasiblePlan(format!(
            "no schedule with at least one optimal-interval measurement fits \
             total time {total_time} (tau_s = {tau_s:.6}, tau_opt = {tau_opt:.6})"
        )));
    };
    let epsilon = 0.5 + l_distinction.ln() / (n_total as f64).ln();
    Ok(HybridPlan {
        q,
        n_total,
        tau_s,
        tau_opt,
        epsilon,
        l_distinction,
        eta,
    })
}
