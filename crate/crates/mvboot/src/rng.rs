//! Deterministic seeded random streams.
//!
//! Every randomized routine owns a child generator derived from the master
//! seed and a path of indices, so results are bitwise reproducible and never
//! depend on worker count or execution order: replicate `b` of a parallel
//! loop always uses `stream_rng(seed, STREAM_X, &[b])` no matter which
//! thread runs it.
//!
//! Splitting function: starting from the master seed, each path component
//! `c` updates the state as
//!
//! ```text
//! state <- mix64(state ^ mix64(c + GAMMA))
//! ```
//!
//! where `mix64` is the SplitMix64 finalizer and `GAMMA = 0x9E3779B97F4A7C15`.
//! The final state seeds a SplitMix64 sequence whose first four outputs form
//! the 32-byte ChaCha8 key (little-endian words).
//!
//! Standard normal variates are produced by inverse transform: the top 53
//! bits of one `u64` become `u = (k + 0.5) * 2^-53`, strictly inside (0, 1),
//! and the variate is `normal_quantile(u)`.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::stats::normal_quantile;

/// Master seed used when the caller does not supply one; the bytes spell
/// the crate name.
pub const DEFAULT_SEED: u64 = 0x6D76_626F_6F74;

/// Stream tags keep child generators of different purposes disjoint.
pub const STREAM_DESIGN: u64 = 1;
pub const STREAM_NOISE: u64 = 2;
pub const STREAM_RESIDUAL_BOOT: u64 = 3;
pub const STREAM_PAIRS_BOOT: u64 = 4;
pub const STREAM_COVERAGE: u64 = 5;
pub const STREAM_MALLOWS: u64 = 6;
pub const STREAM_TABLE: u64 = 7;

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds one path component into the derivation state.
fn absorb(state: u64, component: u64) -> u64 {
    mix64(state ^ mix64(component.wrapping_add(GAMMA)))
}

/// Derived 64-bit seed for a (master, stream, path) triple; used where a
/// scalar sub-seed is wanted rather than a generator.
pub fn derive_seed(master: u64, stream: u64, path: &[u64]) -> u64 {
    let mut state = absorb(master, stream);
    for &c in path {
        state = absorb(state, c);
    }
    state
}

/// Child generator for a (master, stream, path) triple.
pub fn stream_rng(master: u64, stream: u64, path: &[u64]) -> ChaCha8Rng {
    let state = derive_seed(master, stream, path);
    let mut seed = [0u8; 32];
    let mut s = state;
    for chunk in seed.chunks_mut(8) {
        s = s.wrapping_add(GAMMA);
        chunk.copy_from_slice(&mix64(s).to_le_bytes());
    }
    ChaCha8Rng::from_seed(seed)
}

/// Uniform draw strictly inside (0, 1) from the top 53 bits of one `u64`.
pub fn open_unit_uniform(rng: &mut impl RngCore) -> f64 {
    let k = rng.next_u64() >> 11;
    (k as f64 + 0.5) * (1.0 / 9_007_199_254_740_992.0)
}

/// Standard normal variate by inverse transform of [`open_unit_uniform`].
pub fn standard_normal(rng: &mut impl RngCore) -> f64 {
    normal_quantile(open_unit_uniform(rng))
}

/// Uniform index in `0..n`, via the generator's unbiased range sampling.
pub fn uniform_index(rng: &mut ChaCha8Rng, n: usize) -> usize {
    use rand::Rng;
    rng.random_range(0..n)
}
