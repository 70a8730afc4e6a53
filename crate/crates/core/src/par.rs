//! Grid evaluation helpers. Parallel by default, sequential without the
//! `parallel` feature.

use std::sync::Once;

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "NCSPHERE_THREADS";

static INIT: Once = Once::new();

/// Reads `NCSPHERE_THREADS` once and sizes the global pool from it.
/// Unset or unparsable values leave the default pool alone.
pub fn init_threads_from_env() {
    INIT.call_once(|| {
        #[cfg(feature = "parallel")]
        if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|s| s.trim().parse::<usize>().ok()) {
            if n > 0 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    });
}

pub fn map_seq<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

#[cfg(feature = "parallel")]
pub fn map_par<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    use rayon::prelude::*;
    init_threads_from_env();
    items.par_iter().map(f).collect()
}

/// Order-preserving map over a slice.
pub fn map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        map_par(items, f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        map_seq(items, f)
    }
}

/// `n` points evenly spaced on `[a, b)`.
pub fn linspace_open(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / n as f64).collect()
}

/// `n` points evenly spaced on `[a, b]`.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}
