//! Deterministic substream derivation.
//!
//! Every stochastic operation in the crate draws from a ChaCha stream
//! seeded by `substream(master, role, ids)`. The derivation is a pure
//! function of its arguments, so trial `t` sees the same stream whether
//! trials run sequentially or across threads, and independent roles
//! (payload, states, noise, ...) never share a stream even for the same
//! trial index.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Role tags keep streams for different purposes disjoint.
pub const ROLE_PAYLOAD: u64 = 0x5041594c;
pub const ROLE_STATES: u64 = 0x53544154;
pub const ROLE_NOISE: u64 = 0x4e4f4953;
pub const ROLE_FLIP: u64 = 0x464c4950;
pub const ROLE_GENIE: u64 = 0x47454e49;
pub const ROLE_CONSTRUCT: u64 = 0x434f4e53;

// splitmix64 finalizer; good avalanche, cheap.
fn mix(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Collapses `(master, role, ids...)` into a single well-mixed word.
pub fn derive_seed(master: u64, role: u64, ids: &[u64]) -> u64 {
    let mut s = mix(master ^ mix(role));
    for &id in ids {
        s = mix(s ^ mix(id));
    }
    s
}

/// A ChaCha stream for the given (master seed, role, index path).
pub fn substream(master: u64, role: u64, ids: &[u64]) -> ChaCha8Rng {
    let s = derive_seed(master, role, ids);
    let mut key = [0u8; 32];
    for (i, chunk) in key.chunks_exact_mut(8).enumerate() {
        chunk.copy_from_slice(&mix(s.wrapping_add(i as u64 + 1)).to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}
