//! Thin switch between rayon and plain iterators.
//!
//! With the `parallel` feature the helpers fan out over the rayon pool;
//! without it they run the same closures sequentially. Reductions are
//! always collected in index order so results never depend on scheduling.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `op` over `0..len`, returning results in index order.
pub fn map_range<T, F>(len: usize, op: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..len).into_par_iter().map(op).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..len).map(op).collect()
    }
}

/// Maps `op` over a slice, returning results in slice order.
pub fn map_slice<S, T, F>(items: &[S], op: F) -> Vec<T>
where
    S: Sync,
    T: Send,
    F: Fn(&S) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(op).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(op).collect()
    }
}

/// Applies `op` to each `chunk`-sized mutable block of `data`.
pub fn for_each_chunk_mut<T, F>(data: &mut [T], chunk: usize, op: F)
where
    T: Send,
    F: Fn(&mut [T]) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        data.par_chunks_mut(chunk).for_each(op)
    }
    #[cfg(not(feature = "parallel"))]
    {
        data.chunks_mut(chunk).for_each(op)
    }
}

pub fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}
