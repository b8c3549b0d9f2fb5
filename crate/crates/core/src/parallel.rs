//! Execution shims shared by the data-parallel loops.
//!
//! The pattern everywhere is "parallel map over a fixed index structure,
//! sequential fold in index order", which does not depend on the thread
//! count or on whether the `parallel` feature is enabled — a given input
//! produces bit-identical results in sequential builds, parallel builds,
//! and under any `--threads` setting.

/// Chunk length for parallel element fills.
pub(crate) const SUM_BLOCK: usize = 4096;

#[cfg(feature = "parallel")]
pub(crate) fn map_indexed<T, F>(count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..count).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_indexed<T, F>(count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..count).map(f).collect()
}
