//! Execution policy for the data-parallel kernels.
//!
//! With the `parallel` feature the `Rayon` policy dispatches to the global
//! rayon pool; without it every policy runs sequentially. Kernels are
//! written so that both paths produce bit-identical results.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parallelism {
    Sequential,
    Rayon,
}

impl Default for Parallelism {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Parallelism::Rayon
        } else {
            Parallelism::Sequential
        }
    }
}

impl Parallelism {
    /// True when work will actually be spread over the rayon pool.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Parallelism::Rayon
    }

    /// Ordered map over a slice.
    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            use rayon::prelude::*;
            return items.par_iter().map(f).collect();
        }
        items.iter().map(f).collect()
    }

    /// Calls `f(index, chunk)` for consecutive chunks of `chunk_len`
    /// elements.
    pub fn for_each_chunk_mut<T, F>(self, data: &mut [T], chunk_len: usize, f: F)
    where
        T: Send,
        F: Fn(usize, &mut [T]) + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            use rayon::prelude::*;
            data.par_chunks_mut(chunk_len)
                .enumerate()
                .for_each(|(k, c)| f(k, c));
            return;
        }
        data.chunks_mut(chunk_len)
            .enumerate()
            .for_each(|(k, c)| f(k, c));
    }

    /// Calls `f(index, chunk)` for consecutive chunks and returns the
    /// largest value it reports.
    pub fn chunks_max<T, F>(self, data: &mut [T], chunk_len: usize, f: F) -> f64
    where
        T: Send,
        F: Fn(usize, &mut [T]) -> f64 + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            use rayon::prelude::*;
            return data
                .par_chunks_mut(chunk_len)
                .enumerate()
                .map(|(k, c)| f(k, c))
                .reduce(|| 0.0, f64::max);
        }
        data.chunks_mut(chunk_len)
            .enumerate()
            .map(|(k, c)| f(k, c))
            .fold(0.0, f64::max)
    }

    /// Maximum of `f(k)` over `0..n`. The maximum is order independent, so
    /// the result does not depend on the policy.
    pub fn max_over<F>(self, n: usize, f: F) -> f64
    where
        F: Fn(usize) -> f64 + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            use rayon::prelude::*;
            return (0..n).into_par_iter().map(f).reduce(|| 0.0, f64::max);
        }
        (0..n).map(f).fold(0.0, f64::max)
    }
}
