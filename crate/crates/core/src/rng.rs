//! Seeded random streams.
//!
//! Every stochastic component takes a [`SeededRng`]. The generator is ChaCha8,
//! whose output is fixed by the seed on every platform, so a run is fully
//! determined by its seed.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// A single-owner deterministic random stream.
#[derive(Debug, Clone)]
pub struct SeededRng {
    inner: ChaCha8Rng,
}

/// Creates the stream for `seed`. Identical seeds give identical streams.
pub fn seeded_rng(seed: u64) -> SeededRng {
    SeededRng {
        inner: ChaCha8Rng::seed_from_u64(seed),
    }
}

impl SeededRng {
    /// Uniform draw on `[a, b)`.
    pub fn uniform(&mut self, a: f64, b: f64) -> f64 {
        let u: f64 = self.inner.random();
        a + (b - a) * u
    }

    /// `+1.0` or `-1.0` with equal probability.
    pub fn sign(&mut self) -> f64 {
        if self.inner.random::<bool>() {
            1.0
        } else {
            -1.0
        }
    }

    /// Uniform index in `0..n`. `n` must be positive.
    pub fn index(&mut self, n: usize) -> usize {
        self.inner.random_range(0..n)
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }

    /// Uniform direction on the unit sphere in `R^d`.
    pub fn unit_vector(&mut self, d: usize) -> Vec<f64> {
        loop {
            let g: Vec<f64> = (0..d).map(|_| self.standard_normal()).collect();
            let norm = crate::types::norm(&g);
            if norm > 1e-300 {
                return g.into_iter().map(|x| x / norm).collect();
            }
        }
    }

    /// Uniform point in the closed ball of radius `radius` in `R^d`.
    pub fn in_ball(&mut self, d: usize, radius: f64) -> Vec<f64> {
        let dir = self.unit_vector(d);
        let r = radius * self.uniform(0.0, 1.0).powf(1.0 / d as f64);
        dir.into_iter().map(|x| x * r).collect()
    }

    /// Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.index(i + 1);
            items.swap(i, j);
        }
    }
}

impl RngCore for SeededRng {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}
