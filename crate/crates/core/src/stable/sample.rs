//! Chambers–Mallows–Stuck generator for the standardized driver.

use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use super::StableParams;

/// Uniform draw on the open interval `(0, 1)`.
pub fn open_unit<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// Standard normal draw by Box–Muller (one value per pair of uniforms).
pub fn standard_normal<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    let u = open_unit(rng);
    let v = open_unit(rng);
    (-2.0 * u.ln()).sqrt() * (2.0 * PI * v).cos()
}

/// Seeded generator used everywhere a reproducible stream is needed.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `stream` derived from `seed`.
pub fn rng_stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Debug, Clone, Copy)]
pub struct StableSampler {
    alpha: f64,
    shift: f64,
    scale: f64,
}

impl StableSampler {
    pub fn new(params: &StableParams) -> Self {
        let alpha = params.alpha;
        let bt = params.effective_beta() * (PI * alpha / 2.0).tan();
        Self {
            alpha,
            shift: bt.atan() / alpha,
            scale: (1.0 + bt * bt).powf(0.5 / alpha),
        }
    }

    /// One draw of `Z`.
    pub fn draw<R: RngCore + ?Sized>(&self, rng: &mut R) -> f64 {
        let a = self.alpha;
        let v = PI * (open_unit(rng) - 0.5);
        let w = -open_unit(rng).ln();
        let s = a * (v + self.shift);
        self.scale * s.sin() / v.cos().powf(1.0 / a)
            * ((v - s).cos() / w).powf((1.0 - a) / a)
    }

    pub fn fill<R: RngCore + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        for x in out {
            *x = self.draw(rng);
        }
    }
}

/// `n` draws of the standardized driver, reproducible from `seed`.
pub fn sample(params: &StableParams, n: usize, seed: u64) -> Vec<f64> {
    let sampler = StableSampler::new(params);
    let mut rng = rng_from_seed(seed);
    let mut out = alloc::vec![0.0; n];
    sampler.fill(&mut rng, &mut out);
    out
}
