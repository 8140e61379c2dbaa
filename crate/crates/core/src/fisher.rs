// Copyright 2026 Zenoprobe Contributors
// SPDX-License-Identifier: Apache-2.0

//! Fisher information for outcome records of repeatedly measured
//! open quantum systems: the general multinomial form, the binary
//! two-outcome form, closed forms for the driven two-level system
//! with detuning or dephasing, the short-interval expansion with its
//! survival-probability coefficients, and the optimal-interval search.

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::lindblad::{apply_generator, two_level_model, DensityOperator, LindbladModel};
use crate::measurement::{
    stationary_distribution, transition_kernel, MeasurementBasis, TransitionKernel,
};

/// Probability floor below which a kernel entry counts as zero.
pub const PROB_FLOOR: f64 = 1e-12;

/// Derivative floor paired with [`PROB_FLOOR`] in the 0/0 guard.
pub const DERIV_FLOOR: f64 = 1e-9;

/// Validity bound for the short-interval expansion.
pub const EXPANSION_BOUND: f64 = 0.1;

// Scaled trigonometric pair C(w) = cos(sqrt w), S(w) = sin(sqrt w)/sqrt w,
// continued to hyperbolic functions for w < 0 and by series through w = 0.
// The argument is w = (omega^2 - gamma^2) tau^2, so one code path covers
// underdamped, critically damped, and overdamped evolution.
fn cs_pair(w: f64) -> (f64, f64) {
    if w.abs() <= 1e-4 {
        // next omitted term is w^4/8! ~ 2.5e-21 relative
        let c = 1.0 + w * (-0.5 + w * (1.0 / 24.0 - w / 720.0));
        let s = 1.0 + w * (-1.0 / 6.0 + w * (1.0 / 120.0 - w / 5040.0));
        (c, s)
    } else if w > 0.0 {
        let x = w.sqrt();
        (x.cos(), x.sin() / x)
    } else {
        let x = (-w).sqrt();
        (x.cosh(), x.sinh() / x)
    }
}

// G(w) = (C(w) - S(w))/w, the stable building block of dP/dOmega.
fn g_fun(w: f64) -> f64 {
    if w.abs() <= 1e-2 {
        // next omitted term is w^4/9! ~ 2.8e-14 absolute
        -1.0 / 3.0 + w * (1.0 / 30.0 + w * (-1.0 / 840.0 + w / 45360.0))
    } else {
        let (c, s) = cs_pair(w);
        (c - s) / w
    }
}

fn validate_rates(omega: f64, delta: f64, gamma: f64, tau: f64) -> Result<()> {
    for (name, v) in [("omega", omega), ("delta", delta), ("gamma", gamma), ("tau", tau)] {
        if !v.is_finite() {
            return Err(Error::InvalidParameter {
                name,
                reason: format!("must be finite, got {v}"),
            });
        }
    }
    if omega < 0.0 {
        return Err(Error::InvalidParameter {
            name: "omega",
            reason: format!("must be >= 0, got {omega}"),
        });
    }
    if gamma < 0.0 {
        return Err(Error::InvalidParameter {
            name: "gamma",
            reason: format!("must be >= 0, got {gamma}"),
        });
    }
    if tau < 0.0 {
        return Err(Error::InvalidParameter {
            name: "tau",
            reason: format!("must be >= 0, got {tau}"),
        });
    }
    if delta != 0.0 && gamma != 0.0 {
        return Err(Error::UnsupportedClosedForm(format!(
            "no closed form with both detuning ({delta}) and dephasing ({gamma}); propagate instead"
        )));
    }
    Ok(())
}

/// Closed-form ground-state return probability P(g|g) after one interval.
///
/// Supports either detuning (gamma = 0) or dephasing (delta = 0), not
/// both. The dephasing branch is continued to hyperbolic functions for
/// gamma > omega and switches to a series through the critical point.
pub fn analytic_pgg(omega: f64, delta: f64, gamma: f64, tau: f64) -> Result<f64> {
    validate_rates(omega, delta, gamma, tau)?;
    if gamma == 0.0 {
        let chi2 = omega * omega + delta * delta;
        if chi2 == 0.0 {
            return Ok(1.0);
        }
        let chi = chi2.sqrt();
        return Ok(0.5 * (1.0 + (delta * delta + omega * omega * (chi * tau).cos()) / chi2));
    }
    // resonance with dephasing
    if omega > 0.0 && ((omega - gamma) / omega).abs() < 1e-8 {
        // critically damped branch
        return Ok(0.5 + 0.5 * (-omega * tau).exp() * (omega * tau + 1.0));
    }
    let w = (omega * omega - gamma * gamma) * tau * tau;
    let (c, s) = cs_pair(w);
    Ok(0.5 + 0.5 * (-gamma * tau).exp() * (c + gamma * tau * s))
}

/// Derivative of [`analytic_pgg`] with respect to the Rabi frequency.
pub fn analytic_pgg_domega(omega: f64, delta: f64, gamma: f64, tau: f64) -> Result<f64> {
    validate_rates(omega, delta, gamma, tau)?;
    if gamma == 0.0 {
        let chi2 = omega * omega + delta * delta;
        if chi2 == 0.0 {
            return Ok(0.0);
        }
        let chi = chi2.sqrt();
        let half = 0.5 * chi * tau;
        return Ok(-omega * half.sin()
            * (2.0 * delta * delta * half.sin() + omega * omega * chi * tau * half.cos())
            / (chi2 * chi2));
    }
    let w = (omega * omega - gamma * gamma) * tau * tau;
    let (_, s) = cs_pair(w);
    Ok((-gamma * tau).exp() * 0.5 * omega * tau * tau * (gamma * tau * g_fun(w) - s))
}

/// Fisher information per measurement for a binary outcome.
pub fn fisher_binary(p: f64, dp: f64) -> Result<f64> {
    if !p.is_finite() || !dp.is_finite() {
        return Err(Error::NonFinite("binary Fisher input"));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter {
            name: "p",
            reason: format!("must lie in [0, 1], got {p}"),
        });
    }
    if p == 0.0 || p == 1.0 {
        if dp == 0.0 {
            return Ok(0.0);
        }
        return Err(Error::DivergentInformation { p });
    }
    Ok(dp * dp / (p * (1.0 - p)))
}

/// Closed-form Fisher information per measurement for Rabi-frequency
/// estimation in the two-level system, for detuning or dephasing.
pub fn analytic_fisher(omega: f64, delta: f64, gamma: f64, tau: f64) -> Result<f64> {
    validate_rates(omega, delta, gamma, tau)?;
    if delta == 0.0 && gamma == 0.0 {
        // resonant unitary case, independent of omega
        return Ok(tau * tau);
    }
    if gamma == 0.0 {
        let chi2 = omega * omega + delta * delta;
        let chi = chi2.sqrt();
        let half = 0.5 * chi * tau;
        let num = omega * omega * chi * tau * half.cos() + 2.0 * delta * delta * half.sin();
        let den = chi2 * chi2 * (delta * delta + omega * omega * half.cos() * half.cos());
        return Ok(num * num / den);
    }
    let p = analytic_pgg(omega, 0.0, gamma, tau)?;
    let dp = analytic_pgg_domega(omega, 0.0, gamma, tau)?;
    fisher_binary(p, dp)
}

// Printed closed form of the dephased Fisher information, kept verbatim
// as an independent cross-check of the stable evaluation above. Valid
// for omega > gamma only (real omega_eff) and away from sin zeros.
#[allow(dead_code)]
pub(crate) fn dephased_fisher_printed_form(omega: f64, gamma: f64, tau: f64) -> f64 {
    let w = (omega * omega - gamma * gamma).sqrt();
    let num = gamma * w * tau * (w * tau).cos() - (gamma + w * w * tau) * (w * tau).sin();
    let den = omega * omega - 2.0 * w * w * (2.0 * gamma * tau).exp()
        + (w * w - gamma * gamma) * (2.0 * w * tau).cos()
        + 2.0 * gamma * w * (2.0 * w * tau).sin();
    -2.0 * omega * omega * num * num / (w.powi(4) * den)
}

/// Strong-driving approximation to the Fisher information per time.
pub fn strong_drive_fisher_rate(omega: f64, gamma: f64, tau: f64) -> Result<f64> {
    if !(omega > gamma) {
        return Err(Error::InvalidParameter {
            name: "omega",
            reason: format!("strong-driving form needs omega > gamma, got {omega} <= {gamma}"),
        });
    }
    if tau < 0.0 {
        return Err(Error::InvalidParameter {
            name: "tau",
            reason: format!("must be >= 0, got {tau}"),
        });
    }
    if gamma == 0.0 {
        // algebraic limit of the expression below
        return Ok(tau);
    }
    let w = (omega * omega - gamma * gamma).sqrt();
    let e = (-2.0 * gamma * tau).exp();
    let s = (w * tau).sin();
    let c = (w * tau).cos();
    Ok(tau * e * s * s / (1.0 - e * c * c))
}

/// General Fisher information per measurement from the outcome chain.
///
/// Differentiates the transition kernel with a Richardson-refined
/// central difference and sums the multinomial contributions weighted
/// by the stationary outcome distribution. Entries where probability
/// and derivative both vanish are dropped; a vanishing probability
/// with a surviving derivative is reported as divergent.
pub fn fisher_general<F>(
    family: F,
    theta0: f64,
    basis: &MeasurementBasis,
    tau: f64,
    h: Option<f64>,
) -> Result<f64>
where
    F: Fn(f64) -> Result<LindbladModel>,
{
    if !(tau > 0.0) {
        return Err(Error::InvalidParameter {
            name: "tau",
            reason: format!("must be > 0, got {tau}"),
        });
    }
    let h = match h {
        Some(v) if v > 0.0 && v.is_finite() => v,
        Some(v) => {
            return Err(Error::InvalidParameter {
                name: "h",
                reason: format!("must be positive and finite, got {v}"),
            })
        }
        None => 1e-6 * theta0.abs().max(1.0),
    };
    let kernel_at = |theta: f64| -> Result<TransitionKernel> {
        transition_kernel(&family(theta)?, basis, tau)
    };
    let k0 = kernel_at(theta0)?;
    let pi = stationary_distribution(&k0)?;
    let kp = kernel_at(theta0 + h)?;
    let km = kernel_at(theta0 - h)?;
    let kp2 = kernel_at(theta0 + 0.5 * h)?;
    let km2 = kernel_at(theta0 - 0.5 * h)?;

    let n = k0.len();
    let mut fisher = 0.0;
    for (l, &pl) in pi.iter().enumerate() {
        for m in 0..n {
            let d1 = (kp.prob(m, l) - km.prob(m, l)) / (2.0 * h);
            let d2 = (kp2.prob(m, l) - km2.prob(m, l)) / h;
            // one Richardson step: error drops from O(h^2) to O(h^4)
            let dk = (4.0 * d2 - d1) / 3.0;
            let k = k0.prob(m, l);
            if k < PROB_FLOOR {
                if dk.abs() < DERIV_FLOOR {
                    continue;
                }
                return Err(Error::DivergentInformation { p: k });
            }
            fisher += pl * dk * dk / k;
        }
    }
    Ok(fisher.max(0.0))
}

/// Linear and quadratic survival-probability coefficients.
///
/// The survival probability of a measured initial state expands as
/// P0(tau) = 1 + a tau + b tau^2 + O(tau^3).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZenoCoefficients {
    /// Linear coefficient a = Tr(rho0 L[rho0]).
    pub a: f64,
    /// Quadratic coefficient b = Tr(rho0 L^2[rho0]) / 2.
    pub b: f64,
}

impl ZenoCoefficients {
    /// Effective decay rate of the survival probability, -tau b.
    pub fn zeno_rate(&self, tau: f64) -> f64 {
        -tau * self.b
    }
}

fn re_trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let n = a.nrows();
    let mut t = 0.0;
    for i in 0..n {
        for j in 0..n {
            t += (a[[i, j]] * b[[j, i]]).re;
        }
    }
    t
}

/// Survival-probability coefficients from direct generator application.
pub fn zeno_coefficients(
    model: &LindbladModel,
    rho0: &DensityOperator,
) -> Result<ZenoCoefficients> {
    if model.dim() != rho0.dim() {
        return Err(Error::DimensionMismatch(format!(
            "model dim {} vs state dim {}",
            model.dim(),
            rho0.dim()
        )));
    }
    if rho0.purity() < 1.0 - 1e-10 {
        return Err(Error::InvalidParameter {
            name: "rho0",
            reason: format!(
                "survival expansion requires a pure state, purity {}",
                rho0.purity()
            ),
        });
    }
    let l1 = apply_generator(model, rho0.matrix());
    let l2 = apply_generator(model, &l1);
    let a = re_trace_product(rho0.matrix(), &l1);
    let b = 0.5 * re_trace_product(rho0.matrix(), &l2);

    if model.collapse_ops().is_empty() {
        // closed system: -b must equal the energy variance of rho0
        let h = model.hamiltonian();
        let h2 = h.dot(h);
        let mean = re_trace_product(rho0.matrix(), h);
        let mean2 = re_trace_product(rho0.matrix(), &h2);
        let var = mean2 - mean * mean;
        let dev = (-b - var).abs();
        if dev > 1e-10 * var.abs().max(1.0) {
            return Err(Error::Inconsistency {
                what: "closed-system survival curvature vs energy variance",
                deviation: dev,
            });
        }
    }
    Ok(ZenoCoefficients { a, b })
}

/// Short-interval Fisher information per measurement from the survival
/// expansion coefficients and their parameter derivatives.
///
/// The denominator is taken in absolute value so the result is a
/// nonnegative information; the expansion is diagnostic only and the
/// exact binary form stays authoritative.
pub fn short_tau_fisher(
    coeffs: &ZenoCoefficients,
    dcoeffs: &ZenoCoefficients,
    tau: f64,
) -> Result<f64> {
    if !(tau > 0.0) {
        return Err(Error::InvalidParameter {
            name: "tau",
            reason: format!("must be > 0, got {tau}"),
        });
    }
    let magnitude = coeffs.a.abs() * tau + coeffs.b.abs() * tau * tau;
    if magnitude >= EXPANSION_BOUND {
        return Err(Error::OutsideExpansionRegime { magnitude });
    }
    let num = {
        let lin = dcoeffs.a * tau + dcoeffs.b * tau * tau;
        lin * lin
    };
    if num == 0.0 {
        return Ok(0.0);
    }
    let den = (coeffs.a * tau + (coeffs.a * coeffs.a + coeffs.b) * tau * tau).abs();
    if den < 1e-300 {
        // survival probability is parameter-flat at this order
        return Err(Error::DivergentInformation { p: 1.0 });
    }
    Ok(num / den)
}

/// Fisher information sampled over a grid of interval durations.
#[derive(Debug, Clone)]
pub struct FisherScan {
    /// Interval durations.
    pub taus: Vec<f64>,
    /// Fisher information per measurement at each duration.
    pub per_measurement: Vec<f64>,
    /// Fisher information per time, per_measurement / tau.
    pub per_time: Vec<f64>,
    /// Refined argmax of the per-time values.
    pub optimal_tau: f64,
    /// Per-time value at the optimum.
    pub optimal_value: f64,
}

impl FisherScan {
    /// Interior local maxima of the per-time curve, at grid resolution.
    pub fn local_maxima(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        for i in 1..self.per_time.len().saturating_sub(1) {
            if self.per_time[i] >= self.per_time[i - 1]
                && self.per_time[i] > self.per_time[i + 1]
            {
                out.push((self.taus[i], self.per_time[i]));
            }
        }
        out
    }

    /// CSV rows (tau, fisher_per_measurement, fisher_per_time).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("tau,fisher_per_measurement,fisher_per_time\n");
        for i in 0..self.taus.len() {
            out.push_str(&format!(
                "{},{},{}\n",
                crate::fmt_g17(self.taus[i]),
                crate::fmt_g17(self.per_measurement[i]),
                crate::fmt_g17(self.per_time[i])
            ));
        }
        out
    }
}

/// Fisher information per measurement for the two-level model, using
/// the closed form when only one of detuning and dephasing is present
/// and the general kernel route otherwise.
pub fn two_level_fisher(omega: f64, delta: f64, gamma: f64, tau: f64) -> Result<f64> {
    if delta == 0.0 || gamma == 0.0 {
        return analytic_fisher(omega, delta, gamma, tau);
    }
    let basis = MeasurementBasis::two_level();
    fisher_general(
        |w| two_level_model(w, delta, gamma, 0.0),
        omega,
        &basis,
        tau,
        None,
    )
}

/// Scans the Fisher information per measurement and per time over a
/// uniform grid of interval durations and refines the per-time optimum.
pub fn scan_fisher(
    omega: f64,
    delta: f64,
    gamma: f64,
    tau_range: (f64, f64),
    grid_points: usize,
) -> Result<FisherScan> {
    let (lo, hi) = tau_range;
    if !(lo > 0.0) || !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidParameter {
            name: "tau_range",
            reason: format!("need 0 < lo < hi, got ({lo}, {hi})"),
        });
    }
    if grid_points < 100 {
        return Err(Error::InvalidParameter {
            name: "grid_points",
            reason: format!("need at least 100, got {grid_points}"),
        });
    }
    let mut taus = Vec::with_capacity(grid_points);
    let mut per_measurement = Vec::with_capacity(grid_points);
    let mut per_time = Vec::with_capacity(grid_points);
    for i in 0..grid_points {
        // Pin the endpoints so range-end optima are reported exactly.
        let t = if i == grid_points - 1 {
            hi
        } else {
            lo + (hi - lo) * i as f64 / (grid_points - 1) as f64
        };
        let f = two_level_fisher(omega, delta, gamma, t)?;
        taus.push(t);
        per_measurement.push(f);
        per_time.push(f / t);
    }
    let mut best = 0usize;
    for i in 1..grid_points {
        if per_time[i] > per_time[best] {
            best = i;
        }
    }
    if per_time[best] <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "scan",
            reason: "Fisher information vanishes over the whole grid".into(),
        });
    }
    let (optimal_tau, optimal_value) = if best == 0 || best == grid_points - 1 {
        (taus[best], per_time[best])
    } else {
        refine_rate_maximum(
            omega,
            delta,
            gamma,
            taus[best - 1],
            taus[best + 1],
        )?
    };
    Ok(FisherScan {
        taus,
        per_measurement,
        per_time,
        optimal_tau,
        optimal_value,
    })
}

/// Golden-section refinement of a per-time maximum inside a bracket.
pub fn refine_rate_maximum(
    omega: f64,
    delta: f64,
    gamma: f64,
    mut a: f64,
    mut b: f64,
) -> Result<(f64, f64)> {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let rate = |t: f64| -> Result<f64> { Ok(two_level_fisher(omega, delta, gamma, t)? / t) };
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = rate(x1)?;
    let mut f2 = rate(x2)?;
    // ties break toward the smaller duration (>= keeps the left bracket)
    while (b - a) > 1e-6 * b.abs().max(1e-12) {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = rate(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = rate(x2)?;
        }
    }
    let mid = 0.5 * (a + b);
    Ok((mid, rate(mid)?))
}

/// Grid-plus-golden-section search for the duration maximizing the
/// Fisher information per time.
pub fn optimal_tau(
    omega: f64,
    delta: f64,
    gamma: f64,
    tau_range: (f64, f64),
    grid_points: usize,
) -> Result<(f64, f64)> {
    let scan = scan_fisher(omega, delta, gamma, tau_range, grid_points)?;
    Ok((scan.optimal_tau, scan.optimal_value))
}

/// Squared difference quotient and squared differential quotient of
/// P(g|g) between two Rabi-frequency hypotheses, over a time grid.
pub fn sensitivity_profile(
    omega1: f64,
    omega2: f64,
    delta: f64,
    gamma: f64,
    t_grid: &[f64],
) -> Result<(Vec<f64>, Vec<f64>)> {
    if omega1 == omega2 {
        return Err(Error::InvalidParameter {
            name: "omega2",
            reason: "difference quotient needs distinct frequencies".into(),
        });
    }
    let mut difference = Vec::with_capacity(t_grid.len());
    let mut differential = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let p1 = analytic_pgg(omega1, delta, gamma, t)?;
        let p2 = analytic_pgg(omega2, delta, gamma, t)?;
        let dq = (p2 - p1) / (omega2 - omega1);
        let dd = analytic_pgg_domega(omega1, delta, gamma, t)?;
        difference.push(dq * dq);
        differential.push(dd * dd);
    }
    Ok((difference, differential))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lindblad::{build_liouvillian, propagate, two_level_model, DensityOperator, GROUND};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn rel_err(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn binary_fisher_closed_cases() {
        assert_abs_diff_eq!(fisher_binary(0.5, 0.25).unwrap(), 0.25, epsilon = 1e-15);
        assert_eq!(fisher_binary(0.3, 0.0).unwrap(), 0.0);
        for tau in [0.3, 1.0, 2.6] {
            let omega = 1.0f64;
            let p = (0.5 * omega * tau).cos().powi(2);
            let dp = -(tau / 2.0) * (omega * tau).sin();
            assert!(rel_err(fisher_binary(p, dp).unwrap(), tau * tau) < 1e-12);
        }
        assert!(matches!(
            fisher_binary(0.0, 0.5),
            Err(Error::DivergentInformation { .. })
        ));
        assert_eq!(fisher_binary(1.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn pgg_resonant_and_detuned_branches() {
        for tau in [0.2, 1.5, 4.0] {
            let p = analytic_pgg(1.0, 0.0, 0.0, tau).unwrap();
            assert_abs_diff_eq!(p, 0.5 * (1.0 + tau.cos()), epsilon = 1e-15);
        }
        let (omega, delta, tau) = (1.0_f64, 0.8_f64, 1.7);
        let chi = (omega * omega + delta * delta).sqrt();
        let expect =
            0.5 * (1.0 + (delta * delta + omega * omega * (chi * tau).cos()) / (chi * chi));
        assert_abs_diff_eq!(
            analytic_pgg(omega, delta, 0.0, tau).unwrap(),
            expect,
            epsilon = 1e-15
        );
        assert!(matches!(
            analytic_pgg(1.0, 0.5, 0.5, 1.0),
            Err(Error::UnsupportedClosedForm(_))
        ));
    }

    #[test]
    fn pgg_dephased_branches_match_propagation() {
        let basis_g = DensityOperator::basis_state(GROUND, 2).unwrap();
        for gamma in [0.3, 0.999999, 1.0, 1.5] {
            let model = two_level_model(1.0, 0.0, gamma, 0.0).unwrap();
            let liou = build_liouvillian(&model);
            for tau in [0.4, 1.9, 5.5] {
                let rho = propagate(&basis_g, &liou, tau).unwrap();
                let p = analytic_pgg(1.0, 0.0, gamma, tau).unwrap();
                assert_abs_diff_eq!(p, rho.population(0), epsilon = 1e-11);
            }
        }
    }

    #[test]
    fn pgg_critical_branch_uses_printed_form() {
        let (omega, tau) = (1.0, 2.3);
        let p = analytic_pgg(omega, 0.0, omega, tau).unwrap();
        let expect = 0.5 + 0.5 * (-omega * tau).exp() * (omega * tau + 1.0);
        assert_abs_diff_eq!(p, expect, epsilon = 1e-15);
    }

    #[test]
    fn dephased_derivative_matches_central_difference() {
        for gamma in [0.1, 0.7, 1.0, 1.4] {
            for tau in [0.3, 2.0, 6.0] {
                let h = 1e-6;
                let fd = (analytic_pgg(1.0 + h, 0.0, gamma, tau).unwrap()
                    - analytic_pgg(1.0 - h, 0.0, gamma, tau).unwrap())
                    / (2.0 * h);
                let an = analytic_pgg_domega(1.0, 0.0, gamma, tau).unwrap();
                assert_abs_diff_eq!(an, fd, epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn resonant_fisher_is_tau_squared() {
        for tau in [0.1, 0.5, 1.0, 2.0, 3.0] {
            assert!(rel_err(analytic_fisher(1.0, 0.0, 0.0, tau).unwrap(), tau * tau) < 1e-14);
        }
    }

    #[test]
    fn detuned_fisher_matches_finite_difference_route() {
        for delta in [0.2, 0.5, 1.1] {
            for tau in [0.4, 1.3, PI, 4.7] {
                let h = 1e-6;
                let p = analytic_pgg(1.0, delta, 0.0, tau).unwrap();
                let dp = (analytic_pgg(1.0 + h, delta, 0.0, tau).unwrap()
                    - analytic_pgg(1.0 - h, delta, 0.0, tau).unwrap())
                    / (2.0 * h);
                let reference = fisher_binary(p, dp).unwrap();
                let closed = analytic_fisher(1.0, delta, 0.0, tau).unwrap();
                assert!(
                    rel_err(closed, reference) < 1e-6,
                    "delta={delta} tau={tau}: {closed} vs {reference}"
                );
            }
        }
    }

    #[test]
    fn dephased_fisher_matches_printed_closed_form() {
        for gamma in [0.1, 0.5, 0.9] {
            for tau in [0.5, 2.0, 5.0] {
                let stable = analytic_fisher(1.0, 0.0, gamma, tau).unwrap();
                let printed = dephased_fisher_printed_form(1.0, gamma, tau);
                assert!(
                    rel_err(stable, printed) < 1e-10,
                    "gamma={gamma} tau={tau}: {stable} vs {printed}"
                );
            }
        }
    }

    #[test]
    fn dephased_fisher_is_continuous_through_critical_damping() {
        let tau = 1.8;
        let below = analytic_fisher(1.0, 0.0, 1.0 - 1e-7, tau).unwrap();
        let at = analytic_fisher(1.0, 0.0, 1.0, tau).unwrap();
        let above = analytic_fisher(1.0, 0.0, 1.0 + 1e-7, tau).unwrap();
        assert!(rel_err(below, at) < 1e-5);
        assert!(rel_err(above, at) < 1e-5);
    }

    #[test]
    fn strong_drive_rate_limits() {
        assert_abs_diff_eq!(
            strong_drive_fisher_rate(1.0, 0.0, 0.7).unwrap(),
            0.7,
            epsilon = 1e-15
        );
        let gamma = 0.2;
        let w = (1.0f64 - gamma * gamma).sqrt();
        let at_node = strong_drive_fisher_rate(1.0, gamma, PI / w).unwrap();
        assert!(at_node.abs() < 1e-25);
        assert!(strong_drive_fisher_rate(0.5, 0.6, 1.0).is_err());
    }

    #[test]
    fn strong_drive_rate_near_exact_at_weak_damping() {
        // first maximum of the approximate curve at omega = 20 gamma
        let (omega, gamma) = (1.0, 0.05);
        let tau = 2.152078;
        let approx = strong_drive_fisher_rate(omega, gamma, tau).unwrap();
        let exact = analytic_fisher(omega, 0.0, gamma, tau).unwrap() / tau;
        assert!(
            rel_err(approx, exact) < 0.10,
            "approx {approx} vs exact {exact}"
        );
    }

    #[test]
    fn zeno_coefficients_for_resonant_drive() {
        let model = two_level_model(1.0, 0.0, 0.0, 0.0).unwrap();
        let g = DensityOperator::basis_state(GROUND, 2).unwrap();
        let z = zeno_coefficients(&model, &g).unwrap();
        assert!(z.a.abs() < 1e-12);
        assert_abs_diff_eq!(z.b, -0.25, epsilon = 1e-12);
        assert_abs_diff_eq!(z.zeno_rate(0.05), 0.05 * 0.25, epsilon = 1e-15);
    }

    #[test]
    fn zeno_coefficients_with_dephasing_keep_a_zero() {
        let model = two_level_model(1.0, 0.0, 0.4, 0.0).unwrap();
        let g = DensityOperator::basis_state(GROUND, 2).unwrap();
        let z = zeno_coefficients(&model, &g).unwrap();
        assert!(z.a.abs() < 1e-12);
    }

    #[test]
    fn zeno_linear_coefficient_equals_decay_rate() {
        let gamma_sp = 0.8;
        let model = two_level_model(0.0, 0.0, 0.0, gamma_sp).unwrap();
        let e = DensityOperator::basis_state(1, 2).unwrap();
        let z = zeno_coefficients(&model, &e).unwrap();
        assert_abs_diff_eq!(z.a.abs(), gamma_sp, epsilon = 1e-12);
    }

    #[test]
    fn zeno_coefficients_reject_mixed_states() {
        let model = two_level_model(1.0, 0.0, 0.0, 0.0).unwrap();
        let half = num_complex::Complex64::new(0.5, 0.0);
        let mixed =
            DensityOperator::new(ndarray::Array2::from_diag(&ndarray::arr1(&[half, half])))
                .unwrap();
        assert!(zeno_coefficients(&model, &mixed).is_err());
    }

    #[test]
    fn short_tau_fisher_recovers_resonant_law() {
        let coeffs = ZenoCoefficients { a: 0.0, b: -0.25 };
        let dcoeffs = ZenoCoefficients { a: 0.0, b: -0.5 };
        for tau in [0.01, 0.1, 0.5] {
            let f = short_tau_fisher(&coeffs, &dcoeffs, tau).unwrap();
            assert!(rel_err(f, tau * tau) < 1e-12);
        }
        assert_eq!(
            short_tau_fisher(&coeffs, &ZenoCoefficients { a: 0.0, b: 0.0 }, 0.1).unwrap(),
            0.0
        );
    }

    #[test]
    fn short_tau_fisher_constant_rate_for_linear_decay() {
        // estimating the decay rate itself: a = -rate, da = -1
        let rate = 0.8;
        let coeffs = ZenoCoefficients { a: -rate, b: 0.0 };
        let dcoeffs = ZenoCoefficients { a: -1.0, b: 0.0 };
        let tau = 1e-4;
        let f = short_tau_fisher(&coeffs, &dcoeffs, tau).unwrap();
        assert!(rel_err(f / tau, 1.0 / rate) < 1e-3);
    }

    #[test]
    fn short_tau_fisher_guards_its_regime() {
        let coeffs = ZenoCoefficients { a: 0.0, b: -0.25 };
        let dcoeffs = ZenoCoefficients { a: 0.0, b: -0.5 };
        assert!(matches!(
            short_tau_fisher(&coeffs, &dcoeffs, 2.0),
            Err(Error::OutsideExpansionRegime { .. })
        ));
    }

    #[test]
    fn general_fisher_matches_resonant_law() {
        let basis = MeasurementBasis::two_level();
        for tau in [0.5, 1.0, 2.0] {
            let f = fisher_general(
                |w| two_level_model(w, 0.0, 0.0, 0.0),
                1.0,
                &basis,
                tau,
                None,
            )
            .unwrap();
            assert!(rel_err(f, tau * tau) < 1e-6, "tau={tau}: {f}");
        }
    }

    #[test]
    fn general_fisher_vanishes_without_parameter_dependence() {
        let basis = MeasurementBasis::two_level();
        let f = fisher_general(
            |_| two_level_model(1.0, 0.3, 0.0, 0.0),
            1.0,
            &basis,
            1.2,
            None,
        )
        .unwrap();
        assert!(f.abs() < 1e-15);
    }

    #[test]
    fn general_fisher_matches_detuned_closed_form() {
        let basis = MeasurementBasis::two_level();
        for (delta, tau) in [(0.5, 0.8), (0.5, 2.9), (1.2, 1.6)] {
            let f = fisher_general(
                |w| two_level_model(w, delta, 0.0, 0.0),
                1.0,
                &basis,
                tau,
                None,
            )
            .unwrap();
            let closed = analytic_fisher(1.0, delta, 0.0, tau).unwrap();
            assert!(rel_err(f, closed) < 1e-6, "delta={delta} tau={tau}");
        }
    }

    #[test]
    fn general_fisher_reduces_to_binary_for_symmetric_kernels() {
        let basis = MeasurementBasis::two_level();
        let (gamma, tau, h) = (0.3, 1.7, 1e-6);
        let f = fisher_general(
            |w| two_level_model(w, 0.0, gamma, 0.0),
            1.0,
            &basis,
            tau,
            Some(h),
        )
        .unwrap();
        // same numeric derivative fed through the binary formula
        let k_at = |w: f64| {
            transition_kernel(&two_level_model(w, 0.0, gamma, 0.0).unwrap(), &basis, tau)
                .unwrap()
                .prob(0, 0)
        };
        let d1 = (k_at(1.0 + h) - k_at(1.0 - h)) / (2.0 * h);
        let d2 = (k_at(1.0 + 0.5 * h) - k_at(1.0 - 0.5 * h)) / h;
        let dp = (4.0 * d2 - d1) / 3.0;
        let binary = fisher_binary(k_at(1.0), dp).unwrap();
        // The general route differentiates every kernel entry separately;
        // the complement entries carry their own rounding at scale
        // eps/h ~ 1e-10, which bounds how closely the two routes can agree.
        assert!(rel_err(f, binary) < 1e-8);
    }

    #[test]
    fn per_time_information_vanishes_in_the_frequent_limit() {
        for gamma in [0.0, 0.2] {
            let mut last = f64::INFINITY;
            for k in 2..=5 {
                let tau = 10f64.powi(-k);
                let rate = analytic_fisher(1.0, 0.0, gamma, tau).unwrap() / tau;
                assert!(rate < last, "rate not decreasing at tau={tau}");
                last = rate;
            }
        }
    }

    #[test]
    fn optimum_with_dephasing_matches_reference_value() {
        let (tau, value) = optimal_tau(1.0, 0.0, 0.1, (0.5, 12.0), 2000).unwrap();
        assert_abs_diff_eq!(tau, 4.832274977490011, epsilon = 1e-5);
        assert!(rel_err(value, 1.9541100085087022) < 1e-6);
    }

    #[test]
    fn optimum_without_damping_sits_at_the_range_end() {
        let (tau, value) = optimal_tau(1.0, 0.0, 0.0, (0.1, 7.0), 300).unwrap();
        assert_eq!(tau, 7.0);
        assert!(rel_err(value, 7.0) < 1e-12);
        assert!(optimal_tau(1.0, 0.0, 0.0, (0.1, 7.0), 50).is_err());
        // An undriven dephased system never leaves the ground state, so the
        // whole scan carries zero information.
        assert!(optimal_tau(0.0, 0.0, 0.3, (0.1, 7.0), 300).is_err());
    }

    #[test]
    fn weak_damping_maxima_sit_left_of_the_half_period_lattice() {
        // at gamma = 0.01 the first interior maxima of F/T
        let scan = scan_fisher(1.0, 0.0, 0.01, (0.05, 13.0), 26000).unwrap();
        let grid_maxima = scan.local_maxima();
        assert!(grid_maxima.len() >= 4, "found {}", grid_maxima.len());
        let expected = [2.514234, 5.272303, 8.164247, 11.172881];
        for (k, &(t_grid, _)) in grid_maxima.iter().take(4).enumerate() {
            let half = 13.0 / 26000.0;
            let (t, _) =
                refine_rate_maximum(1.0, 0.0, 0.01, t_grid - half, t_grid + half).unwrap();
            assert_abs_diff_eq!(t, expected[k], epsilon = 1e-4);
        }
    }

    #[test]
    fn sensitivity_profile_limits_and_envelope() {
        let ts: Vec<f64> = (1..400).map(|i| i as f64 * 0.2).collect();
        let (dq, dd) = sensitivity_profile(1.0, 1.0 + 1e-9, 0.0, 0.0, &ts).unwrap();
        for i in 0..ts.len() {
            if dd[i] > 1e-6 {
                assert!(rel_err(dq[i], dd[i]) < 1e-4, "t={}", ts[i]);
            }
        }
        // resonant differential quotient is (t/2 sin t)^2
        for (i, &t) in ts.iter().enumerate() {
            let expect = (0.5 * t * t.sin()).powi(2);
            assert_abs_diff_eq!(dd[i], expect, epsilon = 1e-9 * (1.0 + expect));
        }
        // finite-difference rephasing envelope peaks near pi / dOmega
        let ts2: Vec<f64> = (1..16000).map(|i| i as f64 * 0.005).collect();
        let (dq2, _) = sensitivity_profile(1.0, 1.1, 0.0, 0.0, &ts2).unwrap();
        let peak = ts2[dq2
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0];
        assert_abs_diff_eq!(peak, PI / 0.1, epsilon = 0.5);
        assert!(sensitivity_profile(1.0, 1.0, 0.0, 0.0, &ts).is_err());
    }
}
