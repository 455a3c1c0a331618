//! Data-parallel execution shim.
//!
//! With the `parallel` feature (the default) the helpers fan out over rayon;
//! without it they run sequentially.  Both paths return identical results:
//! ordered maps stay ordered and searches always yield the first hit in input
//! order, so verdicts, counterexamples, and reports never depend on the
//! worker count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Applies `f` to `0..n`, preserving index order in the output.
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Returns the first `Some` produced by `probe` in slice order, along with
/// its index.  Parallel execution may evaluate later entries speculatively
/// but the winner is always the earliest match.
pub fn first_hit<T, R, F>(items: &[T], probe: F) -> Option<(usize, R)>
where
    T: Sync,
    R: Send,
    F: Fn(usize, &T) -> Option<R> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items
            .par_iter()
            .enumerate()
            .find_map_first(|(i, item)| probe(i, item).map(|r| (i, r)))
    }
    #[cfg(not(feature = "parallel"))]
    {
        items
            .iter()
            .enumerate()
            .find_map(|(i, item)| probe(i, item).map(|r| (i, r)))
    }
}
