//! Seeded random streams.
//!
//! Every run owns exactly one ChaCha8 stream derived from its 64-bit seed.
//! ChaCha8 output is fixed by its algorithm rather than by the `rand`
//! release, so a seed replays the same trace across toolchains.
//!
//! Draw order within a run:
//!
//! 1. initialization: one chromosome per member, in member order (an index
//!    sample of the range under permutation sampling, one draw per gene
//!    under independent sampling);
//! 2. per generation: one `f64` in `[0, 1)` for the operator choice, then
//!    - inversion: `k_inv` × (member index, position i, position j),
//!    - crossover: first parent, second parent (distinct), cut point;
//! 3. diversification (only in generations where an attack value is held by
//!    two or more members):
//!    per perturbation attempt, either positions i and j (inversion) or a
//!    partner index and cut point (crossover).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type RunRng = ChaCha8Rng;

/// The primary stream for a run seed.
pub fn run_rng(seed: u64) -> RunRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// An independent stream for the same seed, e.g. for auxiliary sampling in
/// experiments that must not perturb the run's primary stream.
pub fn split_rng(seed: u64, stream: u64) -> RunRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
