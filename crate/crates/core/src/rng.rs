//! Seed handling.
//!
//! All randomness in the crate flows through [`Rng`], a counter-based
//! generator that is stable across platforms. Pipeline stages derive
//! independent streams from one master seed with [`derive_seed`], so adding
//! draws to one stage never perturbs another stage's stream.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The deterministic RNG used everywhere in this crate.
pub type Rng = ChaCha8Rng;

/// Builds the RNG for a master seed.
pub fn rng_from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derives a stage-specific seed from a master seed and a stage tag.
///
/// FNV-1a over the tag bytes, folded with the master seed through a
/// splitmix64 finalizer. Stable across platforms and releases.
pub fn derive_seed(master: u64, tag: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in tag.as_bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    let mut z = master ^ h;
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives the RNG for one stage of a pipeline.
pub fn stage_rng(master: u64, tag: &str) -> Rng {
    rng_from_seed(derive_seed(master, tag))
}
