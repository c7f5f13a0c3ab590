//! Deterministic RNG stream derivation.
//!
//! Every random draw in the workspace comes from a ChaCha8 stream whose
//! 256-bit seed is a SHA-256 digest of (master seed, purpose tag, stream
//! parts). Streams for different purposes or trial coordinates are disjoint
//! by construction, so parallel trials never share state and adding trials
//! never perturbs earlier ones.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// Derive an independent RNG stream from a seed, a purpose tag and stream
/// coordinates.
pub fn derive_rng(seed: u64, tag: &str, parts: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::from_seed(derive_seed_bytes(seed, tag, parts))
}

/// Derive a 64-bit sub-seed (for nesting derivations).
pub fn derive_seed(seed: u64, tag: &str, parts: &[u64]) -> u64 {
    let bytes = derive_seed_bytes(seed, tag, parts);
    u64::from_le_bytes(bytes[..8].try_into().unwrap())
}

fn derive_seed_bytes(seed: u64, tag: &str, parts: &[u64]) -> [u8; 32] {
    let mut hasher = Sha256::new();
    hasher.update(b"nf-sgvb.rng.v1\0");
    hasher.update(seed.to_le_bytes());
    hasher.update((tag.len() as u64).to_le_bytes());
    hasher.update(tag.as_bytes());
    for &p in parts {
        hasher.update(p.to_le_bytes());
    }
    hasher.finalize().into()
}
