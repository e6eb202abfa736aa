//! Data-parallel block driver with a sequential fallback.
//!
//! Results come back ordered by index, so any reduction over them is
//! independent of thread count; combined with counter-based per-block
//! seeds this makes every Monte Carlo output bit-identical across
//! `threads` settings and across the `parallel` feature itself.

#[cfg(feature = "parallel")]
pub fn run_indexed<T: Send>(
    count: u64,
    threads: usize,
    f: impl Fn(u64) -> T + Sync + Send,
) -> Vec<T> {
    use rayon::prelude::*;
    match threads {
        1 => (0..count).map(f).collect(),
        0 => (0..count).into_par_iter().map(f).collect(),
        t => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .expect("thread pool construction")
            .install(|| (0..count).into_par_iter().map(|i| f(i)).collect()),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn run_indexed<T: Send>(
    count: u64,
    _threads: usize,
    f: impl Fn(u64) -> T + Sync + Send,
) -> Vec<T> {
    (0..count).map(f).collect()
}
