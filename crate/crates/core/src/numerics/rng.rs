//! Seeded, splittable random streams.
//!
//! A stream is identified by `(seed, stream_id)`. The pair maps onto a
//! ChaCha20 key and stream number, so the draw sequence is fixed on every
//! platform and two streams with distinct ids never overlap. Replicate `r`
//! of an experiment always uses `stream_id = r`, which makes parallel and
//! serial runs produce identical draws.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha20Rng,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Derive an independent child stream keyed by `tag`.
    ///
    /// The child depends only on `(seed, stream_id, tag)`, never on how many
    /// draws the parent has made.
    pub fn child(&self, tag: u64) -> RngStream {
        let key = splitmix64(self.seed ^ splitmix64(self.stream_id ^ 0xD1B5_4A32_D192_ED03));
        RngStream::new(key, tag)
    }

    /// Uniform draw in `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform draw in the open interval `(0, 1)`.
    pub fn uniform_open(&mut self) -> f64 {
        loop {
            let u = self.uniform();
            if u > 0.0 {
                return u;
            }
        }
    }

    pub fn uniform_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    pub fn normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.rng)
    }

    /// Uniform index in `0..n`.
    pub fn index(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        // Lemire-style rejection keeps the draw unbiased.
        let n64 = n as u64;
        let zone = u64::MAX - (u64::MAX % n64);
        loop {
            let v = self.rng.next_u64();
            if v < zone {
                return (v % n64) as usize;
            }
        }
    }

    /// Gamma(shape, 1) draw.
    pub fn gamma(&mut self, shape: f64) -> Result<f64> {
        let g = Gamma::new(shape, 1.0).map_err(|e| Error::invalid(format!("gamma shape {shape}: {e}")))?;
        Ok(g.sample(&mut self.rng))
    }

    /// Fisher-Yates shuffle driven by this stream.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.index(i + 1);
            items.swap(i, j);
        }
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

/// Beta(a, b) draw via the Gamma ratio `X / (X + Y)`.
pub fn sample_beta(stream: &mut RngStream, a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(Error::invalid(format!("beta shapes must be positive, got ({a}, {b})")));
    }
    loop {
        let x = stream.gamma(a)?;
        let y = stream.gamma(b)?;
        let s = x + y;
        if s > 0.0 {
            let v = x / s;
            if v > 0.0 && v < 1.0 {
                return Ok(v);
            }
        }
    }
}
