//! Execution helpers for the data-parallel inner loops.
//!
//! Every helper preserves input order, so callers that reduce the returned
//! vector sequentially get bit-identical results with and without the
//! `parallel` feature. Reductions that are performed in parallel here are
//! restricted to exactly associative operations (bool and/or, f64 max/min
//! on non-NaN data, integer sums).

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Caps the global worker pool at `n` threads. A no-op for `n = 0` and in
/// sequential builds. Must run before the first parallel call.
pub fn configure_threads(n: usize) -> crate::error::Result<()> {
    #[cfg(feature = "parallel")]
    {
        if n > 0 {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| crate::error::Error::Numeric(format!("thread pool setup: {e}")))?;
        }
        Ok(())
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = n;
        Ok(())
    }
}

/// Map over a slice, in parallel when enabled, preserving order.
pub fn map_slice<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Map over `0..n`, in parallel when enabled, preserving order.
pub fn map_range<U, F>(n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
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

/// Maximum of `f(i)` over `0..n` together with the smallest index attaining
/// it. `f` must not return NaN.
pub fn max_by_index<F>(n: usize, f: F) -> Option<(usize, f64)>
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    let vals = map_range(n, f);
    let mut best: Option<(usize, f64)> = None;
    for (i, v) in vals.into_iter().enumerate() {
        match best {
            Some((_, bv)) if v <= bv => {}
            _ => best = Some((i, v)),
        }
    }
    best
}

/// Minimum counterpart of [`max_by_index`].
pub fn min_by_index<F>(n: usize, f: F) -> Option<(usize, f64)>
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    max_by_index(n, |i| -f(i)).map(|(i, v)| (i, -v))
}
