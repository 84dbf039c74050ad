//! Data-parallel helpers with a sequential fallback and seeded PRNG streams.
//!
//! With the `parallel` feature (default) work items run on the rayon pool;
//! without it they run in order on the calling thread. Results are always
//! returned in index order, so output never depends on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent PRNG stream for `(seed, stream)`.
pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// `(0..n).map(f)` evaluated in parallel when enabled, collected in order.
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Sequential reference used by benchmarks and equivalence tests.
pub fn map_indexed_sequential<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}

/// Apply `f` to every item of a slice, in parallel when enabled.
pub fn map_slice<A, T, F>(items: &[A], f: F) -> Vec<T>
where
    A: Sync,
    T: Send,
    F: Fn(&A) -> T + Sync + Send,
{
    map_indexed(items.len(), |i| f(&items[i]))
}

pub fn parallel_enabled() -> bool {
    cfg!(feature = "parallel")
}
