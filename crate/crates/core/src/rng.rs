//! Deterministic per-replicate random streams.
//!
//! Every Monte Carlo replicate draws from its own ChaCha stream derived from
//! `(seed, index)`, so results do not depend on evaluation order or on the
//! number of worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub type ReplicateRng = ChaCha8Rng;

/// Stream reserved for bootstrap resampling of aggregated draws.
pub(crate) const BOOTSTRAP_STREAM: u64 = u64::MAX;

pub fn replicate_rng(seed: u64, index: u64) -> ReplicateRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Runs `f` for replicate indices `0..count` in parallel, preserving order.
pub(crate) fn par_replicates<T, F>(count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..count).into_par_iter().map(f).collect()
}
