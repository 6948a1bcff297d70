//! Data-parallel helper with a sequential fallback.
//!
//! With the `parallel` feature the map fans out over rayon; results come back
//! in index order either way, so downstream reductions are bit-deterministic.

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

/// Chunked map-plus-sum: evaluates f(0..n), accumulating per chunk to keep
/// memory flat, then folds the chunk partials in index order so the result is
/// deterministic. `zero` supplies the additive identity.
pub fn map_chunk_sum<T, F, Z>(n: usize, chunk_size: usize, zero: Z, f: F) -> T
where
    T: Send,
    for<'a> T: std::ops::AddAssign<&'a T>,
    F: Fn(usize) -> T + Sync + Send,
    Z: Fn() -> T + Sync + Send,
{
    assert!(chunk_size > 0);
    let nchunks = n.div_ceil(chunk_size);
    let partials = map_indexed(nchunks, |ci| {
        let mut acc = zero();
        let hi = ((ci + 1) * chunk_size).min(n);
        for k in ci * chunk_size..hi {
            let v = f(k);
            acc += &v;
        }
        acc
    });
    let mut total = zero();
    for p in &partials {
        total += p;
    }
    total
}

/// Sequential variant regardless of feature flags; used by benches to compare.
pub fn map_indexed_seq<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}
