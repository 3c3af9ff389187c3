//! Deterministic random streams.
//!
//! Every stream is a ChaCha8 generator keyed by `(seed, stream id)`: the seed
//! is expanded to a 256-bit key with `rand_core`'s portable PCG32 expansion
//! and the stream id selects the ChaCha stream. Draw algorithms are fixed
//! here rather than delegated to a distribution crate so that sequences never
//! change underneath saved experiments:
//!
//! * uniform: the top 53 bits of one `u64`, scaled to `[0, 1)`;
//! * normal: basic Box–Muller on `(1 - u1, u2)`, both outputs used, cosine
//!   branch first;
//! * bernoulli: `uniform() < p`;
//! * bounded integers: Lemire's widening multiply (no rejection step).

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// Well-known stream ids so that distinct purposes never share draws.
pub mod streams {
    pub const GEN_MODEL: u64 = 0;
    pub const TRAIN_SAMPLES: u64 = 1;
    pub const VAL_SAMPLES: u64 = 2;
    pub const TEST_SAMPLES: u64 = 3;
    pub const TSP_COORDS: u64 = 4;
    pub const SHUFFLE: u64 = 10;
    pub const PFYL_NOISE: u64 = 11;
    pub const BIAS_DEMO: u64 = 20;
}

/// A single-owner random stream.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream: u64,
    rng: ChaCha8Rng,
    spare_normal: Option<f64>,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self {
            seed,
            stream,
            rng,
            spare_normal: None,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform draw in `[0, 1)`.
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform draw in `[lo, hi)`; returns `lo` when the interval is empty.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        let u = self.unit();
        if hi <= lo {
            return lo;
        }
        lo + (hi - lo) * u
    }

    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        let u1 = 1.0 - self.unit();
        let u2 = self.unit();
        let r = (-2.0 * u1.ln()).sqrt();
        let angle = 2.0 * std::f64::consts::PI * u2;
        self.spare_normal = Some(r * angle.sin());
        r * angle.cos()
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.unit() < p
    }

    /// Integer in `[0, bound)`; `bound` must be positive.
    pub fn below(&mut self, bound: usize) -> usize {
        debug_assert!(bound > 0);
        ((self.next_u64() as u128 * bound as u128) >> 64) as usize
    }

    /// Fisher–Yates shuffle driven by [`RngStream::below`].
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i + 1);
            items.swap(i, j);
        }
    }
}
