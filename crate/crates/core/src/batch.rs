//! Batch evaluation over many independent inputs.
//!
//! With the `parallel` feature, [`map`] spreads work over the rayon pool;
//! without it, everything runs on the calling thread. Results keep input
//! order either way, so callers see identical output.

use crate::algorithm::Algorithm;
use crate::model::{Instance, PackingResult};

/// Applies `f` to every element on the calling thread.
pub fn map_sequential<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    F: Fn(&T) -> R,
{
    items.iter().map(f).collect()
}

/// Applies `f` to every element on the rayon pool.
#[cfg(feature = "parallel")]
pub fn map_parallel<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

/// Applies `f` to every element, in parallel when the `parallel` feature is on.
pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        map_parallel(items, f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        map_sequential(items, f)
    }
}

/// Packs every instance with `algorithm`.
pub fn pack_all(instances: &[Instance], algorithm: &Algorithm) -> Vec<PackingResult> {
    map(instances, |inst| algorithm.run(inst))
}

/// [`pack_all`] pinned to the calling thread.
pub fn pack_all_sequential(instances: &[Instance], algorithm: &Algorithm) -> Vec<PackingResult> {
    map_sequential(instances, |inst| algorithm.run(inst))
}
