//! Seeded random number generation.
//!
//! Every stochastic component of the library draws from
//! xoshiro256++ seeded through `seed_from_u64` (SplitMix64), a named
//! generator with published reference output. Sequences are therefore
//! reproducible across platforms and releases given the same seed.

pub use rand_core::RngCore;
pub use rand_xoshiro::rand_core::SeedableRng;
pub use rand_xoshiro::Xoshiro256PlusPlus;

/// Create the library's generator from a 64-bit seed.
pub fn rng_from_seed(seed: u64) -> Xoshiro256PlusPlus {
    Xoshiro256PlusPlus::seed_from_u64(seed)
}

/// SplitMix64 finalizer; used to mix salts into derived seeds.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive a child seed from a base seed and a salt sequence.
///
/// Parallel tasks (grid points, folds, candidate stop parameters) each
/// receive a seed derived from the run's base seed and their indices, so
/// results do not depend on scheduling order.
pub fn derive_seed(base: u64, salts: &[u64]) -> u64 {
    let mut state = splitmix64(base);
    for &salt in salts {
        state = splitmix64(state ^ splitmix64(salt));
    }
    state
}

/// Salt namespaces for [`derive_seed`], one per task kind.
pub mod salt {
    pub const FOLD: u64 = 0x01;
    pub const GRID_POINT: u64 = 0x02;
    pub const STOP_PROBE: u64 = 0x03;
    pub const STOP_CANDIDATE: u64 = 0x04;
    pub const SUBSAMPLE: u64 = 0x05;
}

/// Deterministic in-place Fisher-Yates shuffle.
///
/// Index selection uses `next_u64() % k`; the modulo bias is negligible
/// at dataset scale and keeps the draw count fixed at one per swap.
pub fn shuffle<T>(items: &mut [T], rng: &mut Xoshiro256PlusPlus) {
    for i in (1..items.len()).rev() {
        let j = (rng.next_u64() % (i as u64 + 1)) as usize;
        items.swap(i, j);
    }
}
