//! Deterministic test-data generator.
//!
//! Algorithm (fixed so other implementations can reproduce every family):
//!
//! * Generator: ChaCha with 8 rounds, keyed from the 64-bit seed by
//!   `rand_core`'s `seed_from_u64` (PCG32 expansion of the seed into the
//!   32-byte key), stream 0 unless [`SeededRng::with_stream`] selects another.
//! * Real draw: take the next 64-bit output `u`, form
//!   `x = (u >> 11) * 2^-53` in `[0, 1)`, return `2x - 1` in `[-1, 1)`.
//! * Complex draw: real part first, then imaginary part.
//! * A tree function draws its vertex values in vertex order.

use num_complex::Complex64;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::transform::TreeFunction;

pub struct SeededRng {
    inner: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        SeededRng {
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Independent stream for sub-families (e.g. one per acceptance criterion).
    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        SeededRng { inner }
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    pub fn unit(&mut self) -> f64 {
        (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[-1, 1)`.
    pub fn real(&mut self) -> f64 {
        2.0 * self.unit() - 1.0
    }

    pub fn complex(&mut self) -> Complex64 {
        let re = self.real();
        let im = self.real();
        Complex64::new(re, im)
    }

    /// Uniform index in `0..n` (multiply-shift on the top 32 bits).
    pub fn index(&mut self, n: usize) -> usize {
        (((self.inner.next_u64() >> 32) * n as u64) >> 32) as usize
    }

    pub fn tree_function(&mut self, n: usize) -> TreeFunction {
        TreeFunction::from_values((0..n).map(|_| self.complex()).collect())
    }

    pub fn real_tree_function(&mut self, n: usize) -> TreeFunction {
        TreeFunction::from_values((0..n).map(|_| Complex64::new(self.real(), 0.0)).collect())
    }

    pub fn family(&mut self, n: usize, count: usize) -> Vec<TreeFunction> {
        (0..count).map(|_| self.tree_function(n)).collect()
    }
}
