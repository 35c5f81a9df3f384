//! Scoped-thread map over an index range, capped by `MOYAL_THREADS`.

use std::num::NonZeroUsize;

/// Worker count: `MOYAL_THREADS` if set and positive, else the available parallelism.
pub fn thread_count() -> usize {
    std::env::var("MOYAL_THREADS")
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&t| t > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map(NonZeroUsize::get).unwrap_or(1))
}

/// `(0..count).map(op)` evaluated in contiguous chunks; output order is preserved.
pub(crate) fn map_indexed<T, F>(count: usize, op: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let threads = thread_count().min(count.max(1));
    if threads <= 1 {
        return (0..count).map(op).collect();
    }
    let chunk = count.div_ceil(threads);
    let op = &op;
    std::thread::scope(|s| {
        let handles: Vec<_> = (0..threads)
            .map(|t| {
                let lo = (t * chunk).min(count);
                let hi = ((t + 1) * chunk).min(count);
                s.spawn(move || (lo..hi).map(op).collect::<Vec<T>>())
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    })
}

/// Fallible variant; the first error in index order wins.
pub(crate) fn try_map_indexed<T, E, F>(count: usize, op: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(usize) -> Result<T, E> + Sync,
{
    map_indexed(count, op).into_iter().collect()
}
