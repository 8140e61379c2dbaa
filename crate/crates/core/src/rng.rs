// Copyright 2026 Zenoprobe Contributors
// SPDX-License-Identifier: Apache-2.0

//! Counter-based pseudo-random numbers for reproducible trajectory sampling.
//!
//! The generator applies the SplitMix64 output permutation to
//! `seed + counter * GOLDEN_GAMMA`, so the i-th draw depends only on
//! `(seed, i)`. Streams are therefore identical across platforms and
//! across runs, and any draw can be reproduced without replaying the
//! ones before it.

/// Weyl-sequence increment of SplitMix64 (the odd constant 2^64 / phi).
const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output permutation.
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic counter-based generator (SplitMix64 in counter mode).
#[derive(Debug, Clone)]
pub struct CounterRng {
    seed: u64,
    counter: u64,
}

impl CounterRng {
    /// Generator for the stream identified by `seed`, positioned at draw 0.
    pub fn new(seed: u64) -> Self {
        Self { seed, counter: 0 }
    }

    /// Seed this stream was created with.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Number of 64-bit words drawn so far.
    pub fn position(&self) -> u64 {
        self.counter
    }

    /// Next raw 64-bit word.
    pub fn next_u64(&mut self) -> u64 {
        let word = mix(self
            .seed
            .wrapping_add(self.counter.wrapping_mul(GOLDEN_GAMMA)));
        self.counter += 1;
        word
    }

    /// Uniform draw in [0, 1) with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Index sampled from a finite distribution by inverse CDF.
    ///
    /// `weights` need not be normalized; non-finite or negative entries are
    /// treated as zero. Falls back to the last positive-weight index when
    /// rounding leaves the draw above the accumulated total.
    pub fn sample_index(&mut self, weights: &[f64]) -> usize {
        let total: f64 = weights.iter().filter(|w| w.is_finite() && **w > 0.0).sum();
        let mut target = self.next_f64() * total;
        let mut last_positive = 0;
        for (i, &w) in weights.iter().enumerate() {
            if !(w.is_finite() && w > 0.0) {
                continue;
            }
            last_positive = i;
            target -= w;
            if target < 0.0 {
                return i;
            }
        }
        last_positive
    }
}
