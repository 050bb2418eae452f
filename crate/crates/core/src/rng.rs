//! Seeded random streams.
//!
//! Every random consumer draws from a ChaCha8 stream keyed by
//! `(seed, domain)` and selected by a 64-bit stream index, so results are
//! identical across platforms and independent of how work is scheduled
//! across threads. The key is derived with SplitMix64 finalisation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Purpose tags used to separate streams that share a master seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Domain {
    LinkRatioResample = 1,
    ProcessVariance = 2,
    Initialisation = 3,
    Dropout = 4,
    MemberSeed = 5,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes a seed with an index into a new 64-bit seed.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    splitmix64(splitmix64(seed) ^ splitmix64(index.wrapping_add(0xA5A5_A5A5)))
}

/// Independent stream for `(seed, domain, index)`.
pub fn substream(seed: u64, domain: Domain, index: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, domain as u64));
    rng.set_stream(index);
    rng
}
