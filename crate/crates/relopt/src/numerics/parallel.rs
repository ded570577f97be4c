//! Deterministic fork-join map over an index range.
//!
//! Results are collected in index order, so reductions downstream see the
//! same sequence regardless of the worker count.

use std::sync::atomic::{AtomicUsize, Ordering};

static THREADS: AtomicUsize = AtomicUsize::new(0);

/// Set the worker count for grid evaluations (0 = hardware default).
pub fn set_thread_count(n: usize) {
    THREADS.store(n, Ordering::Relaxed);
}

pub fn thread_count() -> usize {
    let configured = THREADS.load(Ordering::Relaxed);
    if configured > 0 {
        configured
    } else {
        std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
    }
}

/// Evaluate `f(0..n)` across workers, returning results in index order.
pub fn parallel_map<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let workers = thread_count().min(n.max(1));
    if workers <= 1 || n < 2 {
        return (0..n).map(f).collect();
    }
    let mut out: Vec<Option<T>> = Vec::with_capacity(n);
    out.resize_with(n, || None);
    let chunk = n.div_ceil(workers);
    std::thread::scope(|scope| {
        for (w, slot) in out.chunks_mut(chunk).enumerate() {
            let f = &f;
            scope.spawn(move || {
                for (off, cell) in slot.iter_mut().enumerate() {
                    *cell = Some(f(w * chunk + off));
                }
            });
        }
    });
    out.into_iter().map(|v| v.expect("worker filled every slot")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_sequential_map() {
        let seq: Vec<u64> = (0..997).map(|i| (i as u64) * 17 + 3).collect();
        let par = parallel_map(997, |i| (i as u64) * 17 + 3);
        assert_eq!(seq, par);
    }

    #[test]
    fn handles_small_inputs() {
        assert_eq!(parallel_map(0, |i| i), Vec::<usize>::new());
        assert_eq!(parallel_map(1, |i| i + 5), vec![5]);
    }
}
