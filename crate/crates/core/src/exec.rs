//! Execution policy for the data-parallel kernels.
//!
//! Every kernel splits its index space into fixed-size chunks whose boundaries
//! depend only on the problem size, and reduces the per-chunk results in chunk
//! order. Sequential and parallel execution therefore produce identical bits.

use std::ops::Range;

/// How a kernel distributes its chunks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    /// Rayon work stealing on the current thread pool. Without the
    /// `parallel` feature this behaves exactly like `Sequential`.
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

impl Exec {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }
}

fn chunk_ranges(len: usize, chunk: usize) -> impl Iterator<Item = Range<usize>> + Clone {
    let chunk = chunk.max(1);
    (0..len.div_ceil(chunk)).map(move |c| c * chunk..((c + 1) * chunk).min(len))
}

/// Evaluates `f` on consecutive ranges of `0..len` and returns the results in
/// range order.
pub fn map_ranges<T, F>(exec: Exec, len: usize, chunk: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(Range<usize>) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        let ranges: Vec<Range<usize>> = chunk_ranges(len, chunk).collect();
        return ranges.into_par_iter().map(f).collect();
    }
    let _ = exec;
    chunk_ranges(len, chunk).map(f).collect()
}

/// Applies `f(chunk_index, chunk)` to consecutive mutable chunks of `data`.
pub fn for_each_chunk_mut<T, F>(exec: Exec, data: &mut [T], chunk: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    let chunk = chunk.max(1);
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        data.par_chunks_mut(chunk)
            .enumerate()
            .for_each(|(i, c)| f(i, c));
        return;
    }
    let _ = exec;
    data.chunks_mut(chunk).enumerate().for_each(|(i, c)| f(i, c));
}

/// Applies `f` to matching chunks of two equally long slices.
pub fn for_each_chunk_pair_mut<T, F>(exec: Exec, lo: &mut [T], hi: &mut [T], chunk: usize, f: F)
where
    T: Send,
    F: Fn(&mut [T], &mut [T]) + Sync + Send,
{
    debug_assert_eq!(lo.len(), hi.len());
    let chunk = chunk.max(1);
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        lo.par_chunks_mut(chunk)
            .zip(hi.par_chunks_mut(chunk))
            .for_each(|(a, b)| f(a, b));
        return;
    }
    let _ = exec;
    lo.chunks_mut(chunk)
        .zip(hi.chunks_mut(chunk))
        .for_each(|(a, b)| f(a, b));
}
