//! Seed derivation and the RNG type used by every sampler.
//!
//! Every random decision in the toolkit flows from a `u64` seed through
//! [`seeded`]. Independent streams (per repetition, per community leaf,
//! per merge step) are derived with [`derive_seed`], which applies the
//! SplitMix64 finalizer to `master ^ splitmix(stream + 1)`. The mixing
//! function is part of the output contract: changing it changes every
//! sample and every report.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SampleRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive the seed of an independent stream from a master seed.
pub fn derive_seed(master: u64, stream: u64) -> u64 {
    splitmix64(master ^ splitmix64(stream.wrapping_add(1)))
}
