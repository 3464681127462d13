//! Deterministic block parallelism.
//!
//! Work is split into fixed-size blocks whose results are folded in block
//! order, so results are identical for any thread count. `EULER_ZETA_THREADS`
//! caps the worker count (0 or unset = auto).

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

pub fn effective_threads() -> usize {
    let configured = std::env::var("EULER_ZETA_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .unwrap_or(0);
    if configured > 0 {
        return configured;
    }
    std::thread::available_parallelism()
        .map(|n| n.get().min(8))
        .unwrap_or(1)
}

/// Evaluates `f(block_index)` for every block and returns the results in
/// block order. `f` must depend only on the block index.
pub fn map_blocks<T, F>(n_blocks: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let threads = effective_threads().min(n_blocks.max(1));
    if threads <= 1 || n_blocks <= 1 {
        return (0..n_blocks).map(f).collect();
    }
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<T>>> =
        Mutex::new((0..n_blocks).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..threads {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n_blocks {
                    break;
                }
                let value = f(i);
                results.lock().unwrap()[i] = Some(value);
            });
        }
    });
    results
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|v| v.expect("every block computed"))
        .collect()
}
