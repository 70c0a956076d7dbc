//! Seeded random numbers: PCG-XSL-RR 128/64 with Box–Muller normals.
//!
//! Every stochastic quantity in the crate is drawn from this generator, keyed
//! by a user seed and a stream index, so results never depend on thread
//! scheduling.

use rand_core::Rng;
use rand_pcg::Pcg64;

// fixed odd multiplier spreading small seeds across the 128-bit state
const SEED_MIX: u128 = 0x9e37_79b9_7f4a_7c15_f39c_c060_5ced_c835;

#[derive(Debug, Clone)]
pub struct SeededRng {
    inner: Pcg64,
    spare: Option<f64>,
}

impl SeededRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        SeededRng { inner: Pcg64::new((seed as u128).wrapping_mul(SEED_MIX), stream as u128), spare: None }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on `[lo, hi)`.
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Standard normal via the Box–Muller transform; the second variate of
    /// each pair is cached.
    pub fn gaussian(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        // 1 - uniform lies in (0, 1], so the logarithm is finite
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        self.spare = Some(r * theta.sin());
        r * theta.cos()
    }

    pub fn gaussian_vec(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.gaussian()).collect()
    }

    /// Uniform index in `0..n` by rejection, free of modulo bias.
    pub fn below(&mut self, n: usize) -> usize {
        assert!(n > 0);
        let n = n as u64;
        let zone = u64::MAX - u64::MAX % n;
        loop {
            let r = self.next_u64();
            if r < zone {
                return (r % n) as usize;
            }
        }
    }

    /// Fisher–Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i + 1);
            items.swap(i, j);
        }
    }
}
