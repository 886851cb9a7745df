//! Ordered map over trial indices, data-parallel when the `parallel` feature is on.

use crate::error::Result;

/// Applies `f` to `0..count` and returns the results in index order.
///
/// Stops at the first error in index order, so the reported failure does not
/// depend on scheduling.
pub fn map_trials<T, F>(count: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        let results: Vec<Result<T>> = (0..count).into_par_iter().map(&f).collect();
        results.into_iter().collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        map_trials_sequential(count, f)
    }
}

/// Single-threaded reference for [`map_trials`].
pub fn map_trials_sequential<T, F>(count: u64, f: F) -> Result<Vec<T>>
where
    F: Fn(u64) -> Result<T>,
{
    (0..count).map(f).collect()
}

/// Whether [`map_trials`] runs on the rayon pool.
pub const fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}
