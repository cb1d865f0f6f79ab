//! Seeded randomness.
//!
//! All stochastic components draw from ChaCha8 streams (`rand_chacha`,
//! `ChaCha8Rng::seed_from_u64`), a generator with a published specification
//! and a stable stream across platforms and releases. Child seeds derive from
//! a splitmix64 absorb of the parent seed and context words, so any run can
//! be replayed from its master seed alone.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// One splitmix64 step; the standard finalizer from Steele et al.
pub fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive a child seed by absorbing context words into a splitmix64 chain.
pub fn mix_seed(parts: &[u64]) -> u64 {
    let mut h = 0x9E37_79B9_7F4A_7C15u64;
    for &p in parts {
        h = splitmix64(h ^ p);
    }
    h
}

/// FNV-1a hash of a string, used to fold names into seed derivations.
pub fn hash_str(s: &str) -> u64 {
    let mut h = 0xCBF2_9CE4_8422_2325u64;
    for b in s.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x1000_0000_01B3);
    }
    h
}

/// The crate-wide seeded generator.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
