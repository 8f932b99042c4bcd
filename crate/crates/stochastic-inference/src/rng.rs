//! Deterministic stream splitting for reproducible Monte-Carlo runs.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// SplitMix64-style mix of a base seed and a stream index. Distinct indices
/// yield statistically independent streams and the map is pure, so Monte-Carlo
/// passes keyed by counter can run in any order (or in parallel) without
/// changing results.
pub fn mix_seed(base: u64, stream: u64) -> u64 {
    let mut z = base ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generator for one Monte-Carlo pass.
pub fn pass_rng(seed: u64, pass: usize) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(mix_seed(seed, pass as u64))
}
