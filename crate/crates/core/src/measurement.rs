// Copyright 2026 Zenoprobe Contributors
// SPDX-License-Identifier: Apache-2.0

//! Projective-measurement semantics: outcome probabilities, state
//! projection, the one-step transition kernel between measurement
//! outcomes, its stationary distribution, and seeded trajectory
//! simulation.

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    check_square_finite, identity, max_abs, trace, vec_matrix, ComplexMatrix,
};
use crate::lindblad::{
    build_liouvillian, propagator_matrix, DensityOperator, LindbladModel,
};
use crate::rng::CounterRng;

/// Tolerance for projector idempotence, orthogonality, and completeness.
pub const BASIS_TOL: f64 = 1e-12;

/// Tolerance for kernel column sums.
pub const KERNEL_TOL: f64 = 1e-12;

/// A complete set of orthogonal projectors with outcome labels.
#[derive(Debug, Clone)]
pub struct MeasurementBasis {
    labels: Vec<String>,
    projectors: Vec<ComplexMatrix>,
    dim: usize,
}

impl MeasurementBasis {
    /// Validates idempotence, mutual orthogonality, and completeness.
    pub fn new(labels: Vec<String>, projectors: Vec<ComplexMatrix>) -> Result<Self> {
        if labels.is_empty() || labels.len() != projectors.len() {
            return Err(Error::InvalidBasis(format!(
                "{} labels for {} projectors",
                labels.len(),
                projectors.len()
            )));
        }
        let dim = projectors[0].nrows();
        let mut sum = Array2::zeros((dim, dim));
        for (k, p) in projectors.iter().enumerate() {
            check_square_finite(p, "projector")?;
            if p.nrows() != dim {
                return Err(Error::InvalidBasis(format!(
                    "projector {k} is {}x{}, expected {dim}x{dim}",
                    p.nrows(),
                    p.ncols()
                )));
            }
            let idem = max_abs(&(&p.dot(p) - p));
            if idem > BASIS_TOL {
                return Err(Error::InvalidBasis(format!(
                    "projector {k} not idempotent (residual {idem:e})"
                )));
            }
            let herm = max_abs(&(p - &crate::linalg::dagger(p)));
            if herm > BASIS_TOL {
                return Err(Error::InvalidBasis(format!(
                    "projector {k} not Hermitian (residual {herm:e})"
                )));
            }
            sum += p;
        }
        for i in 0..projectors.len() {
            for j in (i + 1)..projectors.len() {
                let cross = max_abs(&projectors[i].dot(&projectors[j]));
                if cross > BASIS_TOL {
                    return Err(Error::InvalidBasis(format!(
                        "projectors {i} and {j} overlap (residual {cross:e})"
                    )));
                }
            }
        }
        let comp = max_abs(&(&sum - &identity(dim)));
        if comp > BASIS_TOL {
            return Err(Error::InvalidBasis(format!(
                "projectors do not resolve the identity (residual {comp:e})"
            )));
        }
        Ok(Self { labels, projectors, dim })
    }

    /// Eigenstate basis of a two-level system, labels "g" and "e".
    pub fn two_level() -> Self {
        Self::computational_labeled(2, &["g", "e"])
    }

    /// Computational basis of dimension `dim`, labels "0", "1", ...
    pub fn computational(dim: usize) -> Self {
        let labels: Vec<String> = (0..dim).map(|i| i.to_string()).collect();
        let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
        Self::computational_labeled(dim, &refs)
    }

    fn computational_labeled(dim: usize, labels: &[&str]) -> Self {
        let projectors = (0..dim)
            .map(|i| {
                let mut p: ComplexMatrix = Array2::zeros((dim, dim));
                p[[i, i]] = Complex64::new(1.0, 0.0);
                p
            })
            .collect();
        // rank-1 diagonal projectors satisfy every invariant exactly
        Self {
            labels: labels.iter().map(|s| s.to_string()).collect(),
            projectors,
            dim,
        }
    }

    /// Hilbert-space dimension.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of outcomes.
    pub fn len(&self) -> usize {
        self.projectors.len()
    }

    /// True when the basis has no outcomes (unreachable after `new`).
    pub fn is_empty(&self) -> bool {
        self.projectors.is_empty()
    }

    /// Outcome labels in order.
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Projector for outcome `k`.
    pub fn projector(&self, k: usize) -> &ComplexMatrix {
        &self.projectors[k]
    }

    /// Index of a label, if present.
    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Normalized post-measurement state for outcome `k`.
    pub fn outcome_state(&self, k: usize) -> Result<DensityOperator> {
        let p = &self.projectors[k];
        let t = trace(p).re;
        DensityOperator::new(p.mapv(|z| z / t))
    }
}

/// Outcome probabilities p_k = Tr(P_k rho), clipped to [0, 1].
pub fn outcome_probabilities(
    rho: &DensityOperator,
    basis: &MeasurementBasis,
) -> Result<Vec<f64>> {
    if rho.dim() != basis.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state dim {} vs basis dim {}",
            rho.dim(),
            basis.dim()
        )));
    }
    let probs = raw_probabilities(rho.matrix(), basis)?;
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::Inconsistency {
            what: "outcome probability sum",
            deviation: total - 1.0,
        });
    }
    Ok(probs)
}

/// Probabilities from a raw density matrix, clamping roundoff residue.
fn raw_probabilities(rho: &ComplexMatrix, basis: &MeasurementBasis) -> Result<Vec<f64>> {
    let mut probs = Vec::with_capacity(basis.len());
    for k in 0..basis.len() {
        let p = trace(&basis.projector(k).dot(rho)).re;
        if !p.is_finite() {
            return Err(Error::NonFinite("outcome probability"));
        }
        if p < -1e-10 {
            return Err(Error::Inconsistency {
                what: "negative outcome probability",
                deviation: p,
            });
        }
        probs.push(p.clamp(0.0, 1.0));
    }
    Ok(probs)
}

/// Conditional state after observing outcome `k`: P rho P / p_k.
pub fn project(
    rho: &DensityOperator,
    k: usize,
    basis: &MeasurementBasis,
) -> Result<DensityOperator> {
    let probs = outcome_probabilities(rho, basis)?;
    let p = probs[k];
    if p <= 1e-14 {
        return Err(Error::ZeroProbabilityOutcome {
            label: basis.labels()[k].clone(),
        });
    }
    let proj = basis.projector(k);
    let conditioned = proj.dot(rho.matrix()).dot(proj).mapv(|z| z / p);
    DensityOperator::new(conditioned)
}

/// Conditional outcome probabilities after free evolution for a fixed
/// interval: matrix[(m, l)] = P(outcome m | previous outcome l).
#[derive(Debug, Clone)]
pub struct TransitionKernel {
    matrix: Array2<f64>,
    labels: Vec<String>,
    tau: f64,
}

impl TransitionKernel {
    /// P(outcome m | previous outcome l).
    pub fn prob(&self, m: usize, l: usize) -> f64 {
        self.matrix[[m, l]]
    }

    /// Full column-stochastic matrix.
    pub fn matrix(&self) -> &Array2<f64> {
        &self.matrix
    }

    /// Number of outcomes.
    pub fn len(&self) -> usize {
        self.matrix.nrows()
    }

    /// True when the kernel has no outcomes (unreachable via constructor).
    pub fn is_empty(&self) -> bool {
        self.matrix.nrows() == 0
    }

    /// Outcome labels in order.
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Evolution interval the kernel was built for.
    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Column l as a probability vector over next outcomes.
    pub fn column(&self, l: usize) -> Vec<f64> {
        (0..self.matrix.nrows()).map(|m| self.matrix[[m, l]]).collect()
    }
}

/// Builds the transition kernel for one evolution interval.
pub fn transition_kernel(
    model: &LindbladModel,
    basis: &MeasurementBasis,
    tau: f64,
) -> Result<TransitionKernel> {
    if !(tau >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "tau",
            reason: format!("must be >= 0, got {tau}"),
        });
    }
    if model.dim() != basis.dim() {
        return Err(Error::DimensionMismatch(format!(
            "model dim {} vs basis dim {}",
            model.dim(),
            basis.dim()
        )));
    }
    if tau == 0.0 {
        // no evolution; the repeated outcome is certain
        return Ok(TransitionKernel {
            matrix: Array2::eye(basis.len()),
            labels: basis.labels().to_vec(),
            tau,
        });
    }
    let liouvillian = build_liouvillian(model);
    let prop = propagator_matrix(&liouvillian, tau)?;
    let matrix = kernel_from_propagator(&prop, basis)?;
    Ok(TransitionKernel {
        matrix,
        labels: basis.labels().to_vec(),
        tau,
    })
}

/// Kernel columns from an already-exponentiated propagator.
pub(crate) fn kernel_from_propagator(
    prop: &ComplexMatrix,
    basis: &MeasurementBasis,
) -> Result<Array2<f64>> {
    let n = basis.len();
    let mut matrix = Array2::zeros((n, n));
    for l in 0..n {
        let start = basis.outcome_state(l)?;
        let evolved = apply_propagator(prop, start.matrix())?;
        let probs = raw_probabilities(&evolved, basis)?;
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > KERNEL_TOL {
            return Err(Error::Inconsistency {
                what: "kernel column sum",
                deviation: total - 1.0,
            });
        }
        for m in 0..n {
            matrix[[m, l]] = probs[m];
        }
    }
    Ok(matrix)
}

/// Applies a vectorized propagator to a density matrix.
fn apply_propagator(prop: &ComplexMatrix, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    let v = Array1::from(vec_matrix(rho));
    let out = prop.dot(&v);
    crate::linalg::unvec_matrix(out.as_slice().expect("contiguous"))
}

/// Stationary distribution of the outcome Markov chain: K pi = pi.
///
/// Computed as the one-dimensional nullspace of K - I; a nullspace of
/// any other dimension is reported as an ambiguity.
pub fn stationary_distribution(kernel: &TransitionKernel) -> Result<Vec<f64>> {
    let n = kernel.len();
    let mut a = kernel.matrix().clone();
    for i in 0..n {
        a[[i, i]] -= 1.0;
    }
    let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    let tol = 1e-9 * scale;

    // row-echelon reduction with partial pivoting
    let mut pivot_col_of_row: Vec<Option<usize>> = vec![None; n];
    let mut row = 0usize;
    for col in 0..n {
        let mut best = row;
        for r in row..n {
            if a[[r, col]].abs() > a[[best, col]].abs() {
                best = r;
            }
        }
        if a[[best, col]].abs() <= tol {
            continue;
        }
        if best != row {
            for c in 0..n {
                let tmp = a[[row, c]];
                a[[row, c]] = a[[best, c]];
                a[[best, c]] = tmp;
            }
        }
        for r in (row + 1)..n {
            let f = a[[r, col]] / a[[row, col]];
            for c in col..n {
                a[[r, c]] -= f * a[[row, c]];
            }
        }
        pivot_col_of_row[row] = Some(col);
        row += 1;
        if row == n {
            break;
        }
    }
    let pivot_cols: Vec<usize> = pivot_col_of_row.iter().flatten().copied().collect();
    let free_cols: Vec<usize> = (0..n).filter(|c| !pivot_cols.contains(c)).collect();
    if free_cols.len() != 1 {
        return Err(Error::AmbiguousStationary { dim: free_cols.len() });
    }

    // back-substitute with the free coordinate set to 1
    let mut x = vec![0.0f64; n];
    x[free_cols[0]] = 1.0;
    for r in (0..pivot_cols.len()).rev() {
        let c = pivot_cols[r];
        let mut s = 0.0;
        for j in (c + 1)..n {
            s += a[[r, j]] * x[j];
        }
        x[c] = -s / a[[r, c]];
    }
    let total: f64 = x.iter().sum();
    if total.abs() < 1e-14 {
        return Err(Error::AmbiguousStationary { dim: 1 });
    }
    let mut pi: Vec<f64> = x.iter().map(|v| v / total).collect();
    for p in &mut pi {
        if *p < 0.0 {
            if *p < -1e-8 {
                return Err(Error::Inconsistency {
                    what: "negative stationary weight",
                    deviation: *p,
                });
            }
            *p = 0.0;
        }
    }
    let norm: f64 = pi.iter().sum();
    Ok(pi.into_iter().map(|p| p / norm).collect())
}

/// One segment of a measurement schedule: `count` intervals of `tau`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleSegment {
    pub tau: f64,
    pub count: usize,
}

/// A seeded record of projective-measurement outcomes.
#[derive(Debug, Clone)]
pub struct MeasurementRecord {
    labels: Vec<String>,
    initial: usize,
    outcomes: Vec<usize>,
    schedule: Vec<ScheduleSegment>,
    pair_counts: Vec<Array2<u64>>,
    seed: u64,
}

impl MeasurementRecord {
    /// Builds a record from an explicit outcome list, recomputing the
    /// pair counts per schedule segment.
    pub fn from_outcomes(
        labels: Vec<String>,
        initial: usize,
        outcomes: Vec<usize>,
        schedule: Vec<ScheduleSegment>,
        seed: u64,
    ) -> Result<Self> {
        if initial >= labels.len() {
            return Err(Error::InvalidParameter {
                name: "initial",
                reason: format!("outcome index {initial} out of range {}", labels.len()),
            });
        }
        if let Some(&bad) = outcomes.iter().find(|&&o| o >= labels.len()) {
            return Err(Error::InvalidParameter {
                name: "outcomes",
                reason: format!("outcome index {bad} out of range {}", labels.len()),
            });
        }
        let scheduled: usize = schedule.iter().map(|s| s.count).sum();
        if scheduled != outcomes.len() {
            return Err(Error::ScheduleMismatch {
                scheduled,
                recorded: outcomes.len(),
            });
        }
        let mut record = Self {
            labels,
            initial,
            outcomes,
            schedule,
            pair_counts: Vec::new(),
            seed,
        };
        record.pair_counts = record.recount_pairs();
        Ok(record)
    }

    /// Outcome labels in kernel order.
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Index of the prepared initial outcome.
    pub fn initial(&self) -> usize {
        self.initial
    }

    /// Outcome indices in measurement order.
    pub fn outcomes(&self) -> &[usize] {
        &self.outcomes
    }

    /// Schedule segments the record was generated under.
    pub fn schedule(&self) -> &[ScheduleSegment] {
        &self.schedule
    }

    /// RNG seed that produced the record.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Total number of measurements.
    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    /// True for an empty record.
    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    /// The single interval duration, when the schedule has one segment.
    pub fn tau(&self) -> Option<f64> {
        match self.schedule.len() {
            1 => Some(self.schedule[0].tau),
            _ => None,
        }
    }

    /// Pair counts n[(m, l)] for one schedule segment.
    pub fn pair_counts(&self, segment: usize) -> &Array2<u64> {
        &self.pair_counts[segment]
    }

    /// Pair counts summed over all segments.
    pub fn pair_counts_total(&self) -> Array2<u64> {
        let k = self.labels.len();
        let mut total = Array2::zeros((k, k));
        for counts in &self.pair_counts {
            total += counts;
        }
        total
    }

    /// Fraction of measurements whose outcome differs from the previous one.
    pub fn flip_fraction(&self) -> f64 {
        if self.outcomes.is_empty() {
            return 0.0;
        }
        let mut prev = self.initial;
        let mut flips = 0usize;
        for &o in &self.outcomes {
            if o != prev {
                flips += 1;
            }
            prev = o;
        }
        flips as f64 / self.outcomes.len() as f64
    }

    /// Measurement timestamps (cumulative interval sums).
    pub fn times(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.outcomes.len());
        let mut t = 0.0;
        for seg in &self.schedule {
            for _ in 0..seg.count {
                t += seg.tau;
                out.push(t);
            }
        }
        out
    }

    /// Recomputes pair counts from the outcome list (consistency oracle).
    pub fn recount_pairs(&self) -> Vec<Array2<u64>> {
        let k = self.labels.len();
        let mut counts = Vec::new();
        let mut prev = self.initial;
        let mut idx = 0usize;
        for seg in &self.schedule {
            let mut c: Array2<u64> = Array2::zeros((k, k));
            for _ in 0..seg.count {
                let o = self.outcomes[idx];
                c[[o, prev]] += 1;
                prev = o;
                idx += 1;
            }
            counts.push(c);
        }
        counts
    }

    /// CSV rows (index, time, outcome), row 0 is the prepared state.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,time,outcome\n");
        out.push_str(&format!("0,{},{}\n", crate::fmt_g17(0.0), self.labels[self.initial]));
        for (i, (&o, t)) in self.outcomes.iter().zip(self.times()).enumerate() {
            out.push_str(&format!("{},{},{}\n", i + 1, crate::fmt_g17(t), self.labels[o]));
        }
        out
    }

    /// JSON value with labels, seed, schedule, outcomes, and pair counts.
    pub fn to_json(&self) -> serde_json::Value {
        let pair_counts: Vec<Vec<Vec<u64>>> = self
            .pair_counts
            .iter()
            .map(|c| {
                (0..c.nrows())
                    .map(|m| (0..c.ncols()).map(|l| c[[m, l]]).collect())
                    .collect()
            })
            .collect();
        serde_json::json!({
            "labels": self.labels,
            "initial": self.labels[self.initial],
            "seed": self.seed,
            "schedule": self.schedule.iter().map(|s| {
                serde_json::json!({"tau": s.tau, "count": s.count})
            }).collect::<Vec<_>>(),
            "outcomes": self.outcomes,
            "pair_counts": pair_counts,
        })
    }
}

/// Populations at one intra-interval sample time.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationSample {
    pub time: f64,
    pub populations: Vec<f64>,
}

/// Simulates a single-interval schedule starting from the first outcome.
pub fn simulate_trajectory(
    model: &LindbladModel,
    basis: &MeasurementBasis,
    tau: f64,
    n: usize,
    seed: u64,
    samples_per_interval: usize,
) -> Result<(MeasurementRecord, Vec<PopulationSample>)> {
    simulate_schedule(
        model,
        basis,
        0,
        &[ScheduleSegment { tau, count: n }],
        seed,
        samples_per_interval,
    )
}

/// Simulates a multi-segment schedule of projective measurements.
///
/// Outcomes are drawn from the per-segment transition kernel; when
/// `samples_per_interval > 0` the populations between measurements are
/// sampled on a uniform grid inside every interval.
pub fn simulate_schedule(
    model: &LindbladModel,
    basis: &MeasurementBasis,
    initial: usize,
    schedule: &[ScheduleSegment],
    seed: u64,
    samples_per_interval: usize,
) -> Result<(MeasurementRecord, Vec<PopulationSample>)> {
    if initial >= basis.len() {
        return Err(Error::InvalidParameter {
            name: "initial",
            reason: format!("outcome index {initial} out of range {}", basis.len()),
        });
    }
    let total: usize = schedule.iter().map(|s| s.count).sum();
    if total == 0 {
        return Err(Error::InvalidParameter {
            name: "schedule",
            reason: "must contain at least one measurement".into(),
        });
    }
    let liouvillian = build_liouvillian(model);
    let mut rng = CounterRng::new(seed);
    let mut outcomes = Vec::with_capacity(total);
    let mut pair_counts = Vec::with_capacity(schedule.len());
    let mut samples = Vec::new();
    let mut prev = initial;
    let mut t0 = 0.0f64;

    if samples_per_interval > 0 {
        samples.push(PopulationSample {
            time: 0.0,
            populations: basis_populations(basis, initial)?,
        });
    }

    for seg in schedule {
        if !(seg.tau >= 0.0) || !seg.tau.is_finite() {
            return Err(Error::InvalidParameter {
                name: "tau",
                reason: format!("must be finite and >= 0, got {}", seg.tau),
            });
        }
        let kernel = transition_kernel(model, basis, seg.tau)?;
        let step_prop = if samples_per_interval > 0 && seg.tau > 0.0 {
            Some(propagator_matrix(
                &liouvillian,
                seg.tau / samples_per_interval as f64,
            )?)
        } else {
            None
        };
        let k = basis.len();
        let mut counts: Array2<u64> = Array2::zeros((k, k));
        for _ in 0..seg.count {
            if let Some(prop) = &step_prop {
                let state = basis.outcome_state(prev)?;
                let mut v = Array1::from(vec_matrix(state.matrix()));
                let dt = seg.tau / samples_per_interval as f64;
                for s in 1..=samples_per_interval {
                    v = prop.dot(&v);
                    let rho = crate::linalg::unvec_matrix(
                        v.as_slice().expect("contiguous"),
                    )?;
                    samples.push(PopulationSample {
                        time: t0 + s as f64 * dt,
                        populations: raw_probabilities(&rho, basis)?,
                    });
                }
            }
            let outcome = rng.sample_index(&kernel.column(prev));
            counts[[outcome, prev]] += 1;
            if samples_per_interval > 0 {
                // projection resets the state; record the jump
                samples.push(PopulationSample {
                    time: t0 + seg.tau,
                    populations: basis_populations(basis, outcome)?,
                });
            }
            outcomes.push(outcome);
            prev = outcome;
            t0 += seg.tau;
        }
        pair_counts.push(counts);
    }

    let record = MeasurementRecord {
        labels: basis.labels().to_vec(),
        initial,
        outcomes,
        schedule: schedule.to_vec(),
        pair_counts,
        seed,
    };
    Ok((record, samples))
}

/// Populations of the normalized post-measurement state for outcome `k`.
fn basis_populations(basis: &MeasurementBasis, k: usize) -> Result<Vec<f64>> {
    let state = basis.outcome_state(k)?;
    raw_probabilities(state.matrix(), basis)
}
