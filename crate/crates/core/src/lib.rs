// Copyright 2026 Zenoprobe Contributors
// SPDX-License-Identifier: Apache-2.0

//! Repeated projective measurements on small open quantum systems.
//!
//! The crate simulates Lindblad dynamics interrupted by projective
//! measurements, quantifies how much information such measurement
//! records carry about Hamiltonian parameters (Fisher information,
//! measurement-interval optimization, quantum Zeno scaling), and turns
//! records into parameter estimates with a grid-based Bayesian filter
//! including a coarse-then-optimal hybrid schedule that removes
//! likelihood ambiguities.
//!
//! Modules build on each other bottom-up: [`linalg`] (complex dense
//! kernels), [`lindblad`] (models and propagation), [`measurement`]
//! (projective statistics and trajectory sampling), [`fisher`]
//! (information measures), [`bayes`] (estimation and planning).

// Negated float comparisons like `!(x > 0.0)` are deliberate throughout:
// they reject NaN together with the out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bayes;
pub mod error;
pub mod fisher;
pub mod linalg;
pub mod lindblad;
pub mod measurement;
pub mod rng;

pub use error::{Error, Result};

/// Formats a float with 17 significant digits, locale-independent,
/// round-trip exact for f64. Used by every text artifact this crate or
/// its tools emit.
pub fn fmt_g17(x: f64) -> String {
    format!("{x:.16e}")
}

#[cfg(test)]
mod tests {
    use super::fmt_g17;

    #[test]
    fn fmt_g17_round_trips() {
        for &x in &[0.0, 1.0, -1.5, std::f64::consts::PI, 4.83e-7, 1.0 / 3.0] {
            let back: f64 = fmt_g17(x).parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits());
        }
    }
}
