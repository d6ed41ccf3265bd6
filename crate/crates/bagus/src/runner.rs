//! Order-preserving parallel map over replications and grid points.
//!
//! Parallelism never reaches inside a single fit (the column sweeps are
//! sequential by construction); results are collected in input order so the
//! output is independent of the worker count.

use rayon::prelude::*;

pub fn map_indexed<T, R, F>(jobs: usize, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(usize, &T) -> R + Sync,
{
    if jobs <= 1 || items.len() <= 1 {
        return items.iter().enumerate().map(|(i, t)| f(i, t)).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.min(items.len()))
        .build()
        .expect("building a thread pool cannot fail with a positive size");
    pool.install(|| {
        items
            .par_iter()
            .enumerate()
            .map(|(i, t)| f(i, t))
            .collect()
    })
}

/// Same, but over an index range without materialized items.
pub fn map_range<R, F>(jobs: usize, count: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync,
{
    let indices: Vec<usize> = (0..count).collect();
    map_indexed(jobs, &indices, |_, &i| f(i))
}
