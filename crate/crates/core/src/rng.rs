//! Seeding and substream derivation.
//!
//! All randomness comes from [`ChaCha8Rng`], which produces the same stream on
//! every platform. A run has one master seed; every consumer derives its own
//! seed from it with [`derive_seed`], tagging the derivation with a purpose
//! label and integer coordinates (spec index, sample index, SNR index, ...).
//! Derivation is a SplitMix64 chain, so a derived seed depends only on the
//! master seed and the tag path, never on execution order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// One round of the SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Purpose labels for derived seeds. The discriminant is part of the
/// derivation and must never be renumbered.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Cloud = 1,
    Motion = 2,
    Attitude = 3,
    Fading = 4,
    Noise = 5,
    Split = 6,
    Pilot = 7,
}

/// Derives a child seed from `parent` for the given purpose and coordinates.
pub fn derive_seed(parent: u64, stream: Stream, coords: &[u64]) -> u64 {
    let mut h = splitmix64(parent ^ splitmix64(stream as u64));
    for &c in coords {
        h = splitmix64(h ^ splitmix64(c.wrapping_add(GOLDEN_GAMMA)));
    }
    h
}

pub fn rng_from_seed(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}
