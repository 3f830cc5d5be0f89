//! Seeded random streams shared by every sampler in the crate.
//!
//! All randomness flows through [`stream_rng`]: a master `u64` seed plus a
//! logical stream id are mixed through SplitMix64 into a full 256-bit ChaCha8
//! seed. Parallel code hands each fixed-size work chunk its own stream id, so
//! results never depend on thread count or scheduling. Uniform and Gaussian
//! deviates are generated here from raw `next_u64` output rather than through
//! `rand` distributions, keeping sample streams stable across dependency
//! upgrades.

use rand_chacha::rand_core::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic ChaCha8 generator for logical stream `stream` of `seed`.
///
/// Stream ids are assigned by the caller: 0 is the primary stream and
/// consecutive ids belong to work chunks or auxiliary draws. Distinct
/// (seed, stream) pairs yield independent generators.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut state = seed ^ mix64(stream.wrapping_add(1).wrapping_mul(GOLDEN));
    let mut bytes = [0u8; 32];
    for chunk in bytes.chunks_mut(8) {
        state = state.wrapping_add(GOLDEN);
        chunk.copy_from_slice(&mix64(state).to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(bytes);
    // Separate the ChaCha counter stream as well; cheap extra insurance that
    // chunk streams never overlap even under identical derived seeds.
    rng.set_stream(stream);
    rng
}

/// Derives an independent sub-seed for trial `index` of a Monte Carlo sweep.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    mix64(seed ^ mix64(index.wrapping_add(1).wrapping_mul(GOLDEN)))
}

/// Uniform deviate in [0, 1) with 53 random bits.
pub fn uniform_f64(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform deviate in (0, 1]; safe as a logarithm argument.
pub fn uniform_open_f64(rng: &mut ChaCha8Rng) -> f64 {
    ((rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform index in [0, bound) via Lemire's unbiased multiply-shift rejection.
pub fn uniform_index(rng: &mut ChaCha8Rng, bound: usize) -> usize {
    debug_assert!(bound >= 1);
    let bound = bound as u64;
    let mut x = rng.next_u64();
    let mut m = (x as u128) * (bound as u128);
    let mut low = m as u64;
    if low < bound {
        let threshold = bound.wrapping_neg() % bound;
        while low < threshold {
            x = rng.next_u64();
            m = (x as u128) * (bound as u128);
            low = m as u64;
        }
    }
    (m >> 64) as usize
}

/// Pair of independent standard normal deviates (Box-Muller).
pub fn gaussian_pair(rng: &mut ChaCha8Rng) -> (f64, f64) {
    let u1 = uniform_open_f64(rng);
    let u2 = uniform_f64(rng);
    let radius = (-2.0 * u1.ln()).sqrt();
    let angle = std::f64::consts::TAU * u2;
    (radius * angle.cos(), radius * angle.sin())
}

/// In-place Fisher-Yates shuffle.
pub fn shuffle<T>(rng: &mut ChaCha8Rng, items: &mut [T]) {
    for i in (1..items.len()).rev() {
        let j = uniform_index(rng, i + 1);
        items.swap(i, j);
    }
}
