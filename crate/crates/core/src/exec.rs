//! Execution strategy for the data-parallel inner loops.
//!
//! Everything in this crate that fans out over atoms or trials goes through
//! [`map_indexed`]. With the `parallel` feature (default) it runs on the
//! current rayon pool; without it, a plain sequential loop. Results are
//! collected in index order, so output is identical for every strategy and
//! thread count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `f` over `0..n`, collecting results in index order.
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

/// Sequential twin of [`map_indexed`], always available; the bench suite
/// uses it as the single-thread baseline.
pub fn map_indexed_seq<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}
