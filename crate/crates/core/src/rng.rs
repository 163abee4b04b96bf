//! Reproducible random streams.
//!
//! Every replica of every experiment draws from its own ChaCha8 stream keyed
//! by `(seed, stream)`, so results never depend on scheduling.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub use rand_chacha::ChaCha8Rng as StreamRng;

/// Generator for stream `stream` of master seed `seed`.
pub fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform draw from the open interval (0, 1).
#[inline]
pub fn uniform_open<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// Uniform integer in `0..n`.
#[inline]
pub fn uniform_below<R: RngCore + ?Sized>(rng: &mut R, n: u64) -> u64 {
    debug_assert!(n > 0);
    let zone = u64::MAX - (u64::MAX % n);
    loop {
        let x = rng.next_u64();
        if x < zone {
            return x % n;
        }
    }
}

/// Geometric variable with `P(k) = alpha^k (1 - alpha)`.
#[inline]
pub fn geometric_with_log<R: RngCore + ?Sized>(rng: &mut R, ln_alpha: f64) -> u64 {
    if ln_alpha == f64::NEG_INFINITY {
        return 0;
    }
    let u = uniform_open(rng);
    libm::floor(libm::log(u) / ln_alpha) as u64
}

/// Geometric variable with `P(k) = alpha^k (1 - alpha)`, `alpha` in `[0, 1)`.
#[inline]
pub fn geometric<R: RngCore + ?Sized>(rng: &mut R, alpha: f64) -> u64 {
    if alpha == 0.0 {
        return 0;
    }
    geometric_with_log(rng, libm::log(alpha))
}

/// Standard normal draw (Box–Muller, one value per call).
pub fn normal<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    let u1 = uniform_open(rng);
    let u2 = uniform_open(rng);
    libm::sqrt(-2.0 * libm::log(u1)) * libm::cos(2.0 * core::f64::consts::PI * u2)
}
