//! Seeded deterministic random number generation.
//!
//! A thin wrapper around ChaCha8 that owns every random draw in the crate,
//! so a 64-bit seed fully determines training, splitting, and sampling.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::numerics::scalar::Scalar;

#[derive(Clone, Debug)]
pub struct SeededRng {
    seed: u64,
    rng: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        SeededRng {
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Independent child generator for a tagged subtask (a fold, a worker).
    /// Children depend only on the parent's seed and the tag, never on how
    /// much the parent has been consumed.
    pub fn derive(&self, tag: u64) -> SeededRng {
        SeededRng::new(splitmix64(self.seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15)))
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform in [0, 1) with 53 random bits.
    #[inline]
    pub fn unit_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in [lo, hi).
    #[inline]
    pub fn uniform<T: Scalar>(&mut self, lo: T, hi: T) -> T {
        lo + (hi - lo) * T::from_f64(self.unit_f64())
    }

    /// Uniform index in [0, n). `n` must be nonzero.
    #[inline]
    pub fn below(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        ((self.next_u64() as u128 * n as u128) >> 64) as usize
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.unit_f64() < p
    }

    /// In-place Fisher-Yates shuffle.
    pub fn shuffle<S>(&mut self, items: &mut [S]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i + 1);
            items.swap(i, j);
        }
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}
