//! Deterministic random-number streams.
//!
//! All stochastic code in this crate draws from ChaCha12 generators keyed by
//! the user-supplied 64-bit seed. Independent units of work (shots, sampled
//! circuits, boson-sampler draws) each get their own stream so that results
//! do not depend on thread count or execution order: merging per-unit results
//! is commutative, and each unit's randomness is a pure function of
//! `(seed, unit index)`.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Generator for one unit of work (shot, sequence, sample...).
///
/// Streams with the same `seed` but different `index` are statistically
/// independent; the mapping is pure, so any unit can be replayed in
/// isolation.
pub fn stream_rng(seed: u64, index: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Derives a child seed for a nested experiment component.
///
/// Used when an experiment spawns families of sampling jobs (e.g. one circuit
/// of a quantum-volume run) that internally consume many streams themselves.
/// The derivation is a splitmix64 chain over the parts, so distinct part
/// vectors give independent child seeds.
pub fn derive_seed(seed: u64, parts: &[u64]) -> u64 {
    let mut acc = seed;
    for &p in parts {
        acc = splitmix64(acc ^ splitmix64(p));
    }
    acc
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
