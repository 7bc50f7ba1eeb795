//! Deterministic batch execution.
//!
//! Monte Carlo trials, pairwise distance matrices, and large discrete
//! convolutions are all index-parallel. With the `parallel` feature
//! (default) [`map_indexed`] fans out over rayon; without it the same call
//! runs sequentially. Results are identical either way because every task
//! derives its randomness from [`trial_rng`], never from shared state.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// RNG for task `index` under `master_seed`.
///
/// The splitting rule is fixed: ChaCha8 seeded with the master seed, moved
/// to stream `index`. Distinct indices yield statistically independent
/// streams, so a batch may be scheduled in any order or on any number of
/// threads without changing its output.
pub fn trial_rng(master_seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

/// Applies `f` to every index in `0..count`, collecting results in index order.
pub fn map_indexed<T, F>(count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..count).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..count).map(f).collect()
    }
}

/// Sequential twin of [`map_indexed`].
///
/// Kept unconditionally so benchmarks can compare the two paths and tests
/// can assert scheduling independence.
pub fn map_indexed_seq<T, F>(count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..count).map(f).collect()
}
