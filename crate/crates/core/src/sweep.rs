//! Deterministic evaluation of independent sweep points.
//!
//! With the `parallel` feature (default) points are evaluated on the rayon
//! pool; results are collected in index order either way, so output is
//! byte-identical across thread counts. Disabling the feature swaps in the
//! sequential loop with no other behavioral change.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Evaluate f over 0..n, returning results in index order.
pub fn map_ordered<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        map_ordered_parallel(n, f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        map_ordered_sequential(n, f)
    }
}

/// Sequential reference implementation.
pub fn map_ordered_sequential<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}

/// Data-parallel implementation; rayon's indexed collect preserves order.
#[cfg(feature = "parallel")]
pub fn map_ordered_parallel<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

/// Sweep axis: `steps` points from min to max, linear or logarithmic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scale {
    Linear,
    Log,
}

pub fn grid(min: f64, max: f64, steps: usize, scale: Scale) -> Vec<f64> {
    assert!(steps >= 2, "a sweep needs at least two points");
    match scale {
        Scale::Linear => (0..steps)
            .map(|i| min + (max - min) * i as f64 / (steps - 1) as f64)
            .collect(),
        Scale::Log => {
            assert!(min > 0.0 && max > 0.0, "log grid needs positive bounds");
            let (lmin, lmax) = (min.ln(), max.ln());
            (0..steps)
                .map(|i| (lmin + (lmax - lmin) * i as f64 / (steps - 1) as f64).exp())
                .collect()
        }
    }
}
