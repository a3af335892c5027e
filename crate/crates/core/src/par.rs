//! Data-parallel map helpers with a sequential fallback.
//!
//! Everything downstream calls `maybe_par_map` / `maybe_par_flat_map`; with
//! the `rayon` feature (default) these fan out over the thread pool, without
//! it they run serially. Results preserve input order, so outputs are
//! identical either way. The `*_seq` variants are always available so the
//! bench suite can compare both paths in one build.

#[cfg(feature = "rayon")]
use rayon::prelude::*;

pub fn map_seq<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> U + Sync + Send) -> Vec<U> {
    items.iter().map(f).collect()
}

#[cfg(feature = "rayon")]
pub fn map_par<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> U + Sync + Send) -> Vec<U> {
    items.par_iter().map(f).collect()
}

#[cfg(feature = "rayon")]
pub fn maybe_par_map<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> U + Sync + Send) -> Vec<U> {
    map_par(items, f)
}

#[cfg(not(feature = "rayon"))]
pub fn maybe_par_map<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> U + Sync + Send) -> Vec<U> {
    map_seq(items, f)
}

pub fn flat_map_seq<T: Sync, U: Send>(
    items: &[T],
    f: impl Fn(&T) -> Vec<U> + Sync + Send,
) -> Vec<U> {
    items.iter().flat_map(f).collect()
}

#[cfg(feature = "rayon")]
pub fn maybe_par_flat_map<T: Sync, U: Send>(
    items: &[T],
    f: impl Fn(&T) -> Vec<U> + Sync + Send,
) -> Vec<U> {
    items.par_iter().flat_map_iter(f).collect()
}

#[cfg(not(feature = "rayon"))]
pub fn maybe_par_flat_map<T: Sync, U: Send>(
    items: &[T],
    f: impl Fn(&T) -> Vec<U> + Sync + Send,
) -> Vec<U> {
    flat_map_seq(items, f)
}

/// Index range variant, used where the inputs are cheap to recompute.
pub fn range_map_seq<U: Send>(count: usize, f: impl Fn(usize) -> U + Sync + Send) -> Vec<U> {
    (0..count).map(f).collect()
}

#[cfg(feature = "rayon")]
pub fn range_map_par<U: Send>(count: usize, f: impl Fn(usize) -> U + Sync + Send) -> Vec<U> {
    (0..count).into_par_iter().map(f).collect()
}

#[cfg(feature = "rayon")]
pub fn maybe_par_range_map<U: Send>(count: usize, f: impl Fn(usize) -> U + Sync + Send) -> Vec<U> {
    range_map_par(count, f)
}

#[cfg(not(feature = "rayon"))]
pub fn maybe_par_range_map<U: Send>(count: usize, f: impl Fn(usize) -> U + Sync + Send) -> Vec<U> {
    range_map_seq(count, f)
}
