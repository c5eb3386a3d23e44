//! Seeded random sources.
//!
//! Every sampler takes any [`rand::Rng`]; the helpers here build the
//! default generator so that a seed reproduces a run exactly, and derive
//! non-overlapping streams for parallel instances.

use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;

pub type SamplerRng = Xoshiro256PlusPlus;

pub fn seeded(seed: u64) -> SamplerRng {
    Xoshiro256PlusPlus::seed_from_u64(seed)
}

/// The generator of parallel instance `i` for a base seed: the seeded
/// stream advanced by `i` long jumps of 2^192 draws each.
pub fn instance(seed: u64, i: usize) -> SamplerRng {
    let mut rng = seeded(seed);
    for _ in 0..i {
        rng.long_jump();
    }
    rng
}
