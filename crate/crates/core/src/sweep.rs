//! Sample sweeps. With the `parallel` feature (default) samples are evaluated
//! on the rayon pool; otherwise sequentially. Output order is the sample
//! order either way.

/// Evaluates `f(0..count)` and collects results in index order.
pub fn map_indices<T, F>(count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        map_indices_parallel(count, f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        map_indices_sequential(count, f)
    }
}

pub fn map_indices_sequential<T, F>(count: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..count).map(f).collect()
}

#[cfg(feature = "parallel")]
pub fn map_indices_parallel<T, F>(count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..count).into_par_iter().map(f).collect()
}
