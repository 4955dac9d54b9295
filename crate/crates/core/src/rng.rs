//! Seeded, splittable random streams.
//!
//! Every run derives independent ChaCha streams from its seed, one per
//! consumer, so that what one consumer draws never shifts another consumer's
//! sequence. In particular the component-sampling sequence of a run is the
//! same whatever scheduler or noise it is paired with.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent consumers of randomness within a run or problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    /// Component index `i_t` for each step.
    Sampling = 0,
    /// Loss perturbations.
    Noise = 1,
    /// Problem data (matrices, datasets, teacher weights).
    ProblemData = 2,
    /// Starting point of the optimizer.
    Init = 3,
}

pub fn stream(seed: u64, which: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(which as u64);
    rng
}
