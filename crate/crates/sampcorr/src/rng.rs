//! Seeded randomness.
//!
//! All randomness flows from ChaCha8 keyed by a 64-bit seed. Distinct stream
//! ids give independent sequences under the same seed, so the oracle that
//! simulates input draws and a corrector's private coins never share state.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Stream used by [`crate::DistAccess`] to simulate draws from a known pmf.
pub const ORACLE_STREAM: u64 = 0;
/// Stream used by correctors for their own coin flips.
pub const COIN_STREAM: u64 = 1;

pub fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Private coins of a corrector, with a ledger of how many draws were taken.
#[derive(Debug, Clone)]
pub struct Coins {
    rng: ChaCha8Rng,
    used: u64,
}

impl Coins {
    pub fn new(seed: u64) -> Self {
        Coins {
            rng: stream(seed, COIN_STREAM),
            used: 0,
        }
    }

    /// Uniform in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.used += 1;
        self.rng.random::<f64>()
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }

    /// Uniform integer in `lo..=hi`.
    pub fn range(&mut self, lo: usize, hi: usize) -> usize {
        self.used += 1;
        self.rng.random_range(lo..=hi)
    }

    /// Index drawn proportionally to `weights` (need not be normalized).
    pub fn weighted(&mut self, weights: &[f64]) -> usize {
        let total: f64 = weights.iter().sum();
        let mut u = self.uniform() * total;
        for (i, &w) in weights.iter().enumerate() {
            if u < w {
                return i;
            }
            u -= w;
        }
        weights.iter().rposition(|&w| w > 0.0).unwrap_or(0)
    }

    /// Number of coin draws taken so far.
    pub fn used(&self) -> u64 {
        self.used
    }
}
