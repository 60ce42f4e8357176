//! Portable seeded randomness for synthetic traces.
//!
//! The generator is xoshiro256++ seeded through SplitMix64 (the reference
//! seeding procedure). Uniforms take the top 53 bits of a 64-bit output.
//! Each standard normal consumes exactly two outputs via Box-Muller, keeping
//! only the cosine branch, so a sequence can be reproduced in any language
//! from the seed alone.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

const TWO_POW_NEG_53: f64 = 1.0 / (1u64 << 53) as f64;

#[derive(Debug, Clone)]
pub struct TraceRng {
    inner: Xoshiro256PlusPlus,
}

impl TraceRng {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: Xoshiro256PlusPlus::seed_from_u64(seed),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * TWO_POW_NEG_53
    }

    pub fn standard_normal(&mut self) -> f64 {
        // (0, 1] so the logarithm is finite.
        let u1 = ((self.next_u64() >> 11) + 1) as f64 * TWO_POW_NEG_53;
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    pub fn normal_vec(&mut self, dim: usize) -> Vec<f64> {
        (0..dim).map(|_| self.standard_normal()).collect()
    }
}
