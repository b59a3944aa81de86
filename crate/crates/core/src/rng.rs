// SPDX-License-Identifier: MIT OR Apache-2.0

//! Reproducible random streams.
//!
//! Every random draw in the crate comes from a ChaCha8 generator keyed by a
//! `(seed, domain)` pair and positioned on stream `index`. ChaCha is
//! counter-based, so stream `i` never depends on how many values were taken
//! from stream `j`; parallel work keyed by index is order independent.
//!
//! Normal variates use the ziggurat sampler of `rand_distr::StandardNormal`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Domain tags separating the independent uses of one master seed.
pub mod domain {
    pub const MULTIPLIERS: u64 = 0x6d75_6c74;
    pub const INTERVALS: u64 = 0x696e_7476;
    pub const PANEL: u64 = 0x7061_6e6c;
    pub const REPLICATION: u64 = 0x7265_706c;
    pub const HC_NULL: u64 = 0x6863_6e6c;
}

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Generator for stream `index` of `(seed, domain)`.
pub fn stream(seed: u64, domain: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(mix64(seed ^ mix64(domain)));
    rng.set_stream(index);
    rng
}

/// Derives a child seed, e.g. the bootstrap seed of one Monte Carlo replication.
pub fn child_seed(seed: u64, domain: u64, index: u64) -> u64 {
    mix64(mix64(seed ^ mix64(domain)) ^ index.wrapping_mul(0xd6e8_feb8_6659_fd93))
}

/// Gaussian multipliers `e_1, ..., e_n` for one bootstrap replicate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MultiplierStream {
    pub seed: u64,
    pub replicate_index: u64,
}

impl MultiplierStream {
    pub fn new(seed: u64, replicate_index: u64) -> Self {
        Self {
            seed,
            replicate_index,
        }
    }

    /// Fills `out` with i.i.d. N(0, 1) values.
    pub fn fill(&self, out: &mut [f64]) {
        let mut rng = stream(self.seed, domain::MULTIPLIERS, self.replicate_index);
        for v in out.iter_mut() {
            *v = StandardNormal.sample(&mut rng);
        }
    }

    pub fn draw(&self, n: usize) -> Vec<f64> {
        let mut out = vec![0.0; n];
        self.fill(&mut out);
        out
    }
}
