//! SquareSort and its building blocks.
//!
//! Everything here is written against [`Memory`] so the identical code path
//! runs on the native arena and on the cache simulator. Indices are 0-based:
//! column `i` of an `n`-item buffer spans `[min(i*m, n), min((i+1)*m, n))`
//! with `m = ceil(sqrt(n))`.

mod cursors;
mod layout;
mod pivots;
mod small;
mod square;
mod transpose;

pub use cursors::{bucket_ranges, initial_bucket_cursors, BucketCursors};
pub use layout::{ColumnCursors, ColumnLayout};
pub use pivots::{sample_pivots, PivotSet};
pub use small::{insertion_copy_sort, merge_sort, merge_sort_into};
pub use square::square_sort;
pub use transpose::{naive_skew_transpose, skew_transpose, skew_transpose_traced};

use thiserror::Error;

use crate::memory::{Memory, NativeMemory};
use crate::rng::Rng;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParamError {
    #[error("cutoff must be at least 1, got {0}")]
    Cutoff(usize),
    #[error("naive transpose threshold must be at least 2, got {0}")]
    NaiveThreshold(usize),
    #[error("resampling cap must be at least 1, got {0}")]
    ResampleCap(u32),
}

/// Tuning knobs of [`square_sort`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SortParams {
    cutoff: usize,
    naive_threshold: usize,
    resample_cap: u32,
}

impl Default for SortParams {
    fn default() -> Self {
        Self {
            cutoff: 16,
            naive_threshold: 4,
            resample_cap: 32,
        }
    }
}

impl SortParams {
    pub fn new(cutoff: usize, naive_threshold: usize, resample_cap: u32) -> Result<Self, ParamError> {
        if cutoff < 1 {
            return Err(ParamError::Cutoff(cutoff));
        }
        if naive_threshold < 2 {
            return Err(ParamError::NaiveThreshold(naive_threshold));
        }
        if resample_cap < 1 {
            return Err(ParamError::ResampleCap(resample_cap));
        }
        Ok(Self {
            cutoff,
            naive_threshold,
            resample_cap,
        })
    }

    pub fn with_cutoff(self, cutoff: usize) -> Result<Self, ParamError> {
        Self::new(cutoff, self.naive_threshold, self.resample_cap)
    }

    pub fn with_naive_threshold(self, naive_threshold: usize) -> Result<Self, ParamError> {
        Self::new(self.cutoff, naive_threshold, self.resample_cap)
    }

    pub fn with_resample_cap(self, resample_cap: u32) -> Result<Self, ParamError> {
        Self::new(self.cutoff, self.naive_threshold, resample_cap)
    }

    /// Largest length sorted directly by insertion sort.
    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// Skew transposition falls back to the naive loop once either dimension
    /// drops below this.
    pub fn naive_threshold(&self) -> usize {
        self.naive_threshold
    }

    /// Pivot sampling rounds before accepting a degenerate pivot set.
    pub fn resample_cap(&self) -> u32 {
        self.resample_cap
    }
}

/// Sorts `input` with [`square_sort`] on a fresh [`NativeMemory`].
pub fn sort_native(input: &[u64], params: &SortParams, rng: &mut Rng) -> Vec<u64> {
    let n = input.len();
    let mut mem = NativeMemory::with_capacity(2 * n + 64);
    let src = mem.alloc(n);
    let dst = mem.alloc(n);
    mem.load(src, input);
    square_sort(&mut mem, src, dst, params, rng);
    mem.snapshot(dst)
}

/// Integer `ceil(sqrt(n))`.
pub(crate) fn ceil_sqrt(n: usize) -> usize {
    let r = n.isqrt();
    if r * r < n {
        r + 1
    } else {
        r
    }
}
