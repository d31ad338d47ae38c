//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature every helper runs on the current rayon pool;
//! without it the same closures run on the calling thread. Callers pass work
//! as an index range and get results back in index order, so any reduction
//! done on the returned vector is independent of scheduling.

/// Evaluates `f(i)` for `i in 0..n` and returns the results in index order.
#[cfg(feature = "parallel")]
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}

/// Splits `0..len` into contiguous chunks of `chunk` indices and evaluates
/// `f(range)` on each. Chunk boundaries depend only on `len` and `chunk`.
pub fn map_chunks<T, F>(len: usize, chunk: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(std::ops::Range<usize>) -> T + Sync + Send,
{
    let chunk = chunk.max(1);
    let count = len.div_ceil(chunk);
    map_indexed(count, |c| {
        let start = c * chunk;
        f(start..(start + chunk).min(len))
    })
}

/// Runs `f` with at most `threads` worker threads. `None` keeps the ambient
/// pool. In the sequential build this only calls `f`.
#[cfg(feature = "parallel")]
pub fn with_threads<R: Send>(threads: Option<usize>, f: impl FnOnce() -> R + Send) -> R {
    match threads {
        Some(n) if n > 0 => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        },
        _ => f(),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn with_threads<R: Send>(_threads: Option<usize>, f: impl FnOnce() -> R + Send) -> R {
    f()
}

/// Whether the crate was built with the rayon backend.
pub const fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chunks_cover_range_in_order() {
        let parts = map_chunks(10, 3, |r| r.collect::<Vec<_>>());
        assert_eq!(parts, vec![vec![0, 1, 2], vec![3, 4, 5], vec![6, 7, 8], vec![9]]);
    }

    #[test]
    fn empty_range() {
        assert!(map_chunks(0, 4, |r| r.len()).is_empty());
    }

    #[test]
    fn thread_count_does_not_change_order() {
        let a = with_threads(Some(1), || map_indexed(100, |i| i * i));
        let b = with_threads(Some(4), || map_indexed(100, |i| i * i));
        assert_eq!(a, b);
    }
}
