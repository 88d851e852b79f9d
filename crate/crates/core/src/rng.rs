//! Seeded random streams.
//!
//! Every stochastic decision in the pipeline draws from a
//! [`Xoshiro256PlusPlus`] generator. A stream for a named record is seeded
//! with the first 8 bytes (little-endian) of
//! `SHA-256(seed.to_le_bytes() || 0x00 || label)`, expanded to the full
//! generator state by SplitMix64 (`seed_from_u64`). Uniform floats are
//! `(next_u64 >> 11) * 2^-53`. The scheme depends only on the seed and the
//! label, so streams are independent of processing order.

use rand::{RngCore, SeedableRng};
pub use rand_xoshiro::Xoshiro256PlusPlus;
use sha2::{Digest, Sha256};

pub type StreamRng = Xoshiro256PlusPlus;

/// Derives the 64-bit stream seed for `(seed, label)`.
pub fn stream_seed(seed: u64, label: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update([0u8]);
    h.update(label.as_bytes());
    let digest = h.finalize();
    let mut first = [0u8; 8];
    first.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(first)
}

/// Generator for the record named `label` under `seed`.
pub fn stream(seed: u64, label: &str) -> StreamRng {
    StreamRng::seed_from_u64(stream_seed(seed, label))
}

/// Uniform draw in `[0, 1)` with 53 bits of precision.
pub fn unit_f64<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}
