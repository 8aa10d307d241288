//! Memory backends the sorting code runs on.
//!
//! All algorithms in this crate address memory through [`Memory`]: a flat
//! space of 64-bit cells carved into [`Region`]s with stack (LIFO)
//! allocation. [`NativeMemory`] is a plain arena used for timing, and
//! [`SimMemory`] routes every access through an LRU block cache so that
//! block transfers can be counted.

mod native;
mod sim;

pub use native::NativeMemory;
pub use sim::{CacheConfig, IoCounter, SimMemory};

use thiserror::Error;

/// A contiguous range of cells `[base, base + len)` in a memory's address space.
///
/// Regions are cheap handles; sub-ranges obtained with [`Region::slice`] refer
/// to the same cells.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Region {
    base: usize,
    len: usize,
}

impl Region {
    pub const fn new(base: usize, len: usize) -> Self {
        Self { base, len }
    }

    pub const fn base(&self) -> usize {
        self.base
    }

    pub const fn len(&self) -> usize {
        self.len
    }

    pub const fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// The sub-region `[start, end)`, relative to this region.
    pub fn slice(&self, start: usize, end: usize) -> Region {
        assert!(
            start <= end && end <= self.len,
            "slice {start}..{end} out of bounds for region of length {}",
            self.len
        );
        Region {
            base: self.base + start,
            len: end - start,
        }
    }

    /// Absolute address of cell `idx`.
    #[inline]
    pub(crate) fn addr(&self, idx: usize) -> usize {
        debug_assert!(
            idx < self.len,
            "index {idx} out of bounds for region of length {}",
            self.len
        );
        self.base + idx
    }
}

/// A cell-addressed memory with stack allocation.
///
/// Indices are 0-based and relative to the region. Reading or writing outside
/// a region is a contract violation and panics in debug builds.
pub trait Memory {
    /// Allocates a fresh region of `len` cells on top of the stack.
    fn alloc(&mut self, len: usize) -> Region;

    /// Pops `region`, which must be the most recent live allocation.
    fn release(&mut self, region: Region);

    fn read(&mut self, region: Region, idx: usize) -> u64;

    fn write(&mut self, region: Region, idx: usize, value: u64);

    /// Reads a cell without any side effect on cache state or counters.
    fn peek(&self, region: Region, idx: usize) -> u64;

    /// Copies `values` into the start of `region` through [`Memory::write`].
    fn load(&mut self, region: Region, values: &[u64]) {
        assert!(values.len() <= region.len(), "load overflows region");
        for (i, &v) in values.iter().enumerate() {
            self.write(region, i, v);
        }
    }

    /// Snapshot of a region's contents via [`Memory::peek`].
    fn snapshot(&self, region: Region) -> Vec<u64> {
        (0..region.len()).map(|i| self.peek(region, i)).collect()
    }

    /// Cell-by-cell copy between two equally sized regions.
    fn copy(&mut self, src: Region, dst: Region) {
        assert_eq!(src.len(), dst.len(), "copy between regions of different length");
        for i in 0..src.len() {
            let v = self.read(src, i);
            self.write(dst, i, v);
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MemoryError {
    #[error("block size must be at least 1")]
    ZeroBlock,
    #[error("cache of {cache} cells cannot hold one block of {block} cells")]
    CacheSmallerThanBlock { cache: usize, block: usize },
    #[error("cache size {cache} is not a multiple of block size {block}")]
    NotBlockMultiple { cache: usize, block: usize },
}

/// Bookkeeping shared by both backends: a bump pointer with a LIFO frame stack.
#[derive(Debug, Default, Clone)]
pub(crate) struct StackAllocator {
    top: usize,
    peak: usize,
    frames: Vec<(usize, Region)>,
}

impl StackAllocator {
    /// Returns the new region; `align` is the base alignment in cells.
    pub(crate) fn push(&mut self, len: usize, align: usize) -> Region {
        let base = self.top.div_ceil(align) * align;
        let region = Region::new(base, len);
        self.frames.push((self.top, region));
        self.top = base + len;
        self.peak = self.peak.max(self.top);
        region
    }

    pub(crate) fn pop(&mut self, region: Region) {
        match self.frames.pop() {
            Some((prev_top, top_region)) if top_region == region => self.top = prev_top,
            Some((_, top_region)) => {
                panic!("release of {region:?} out of stack order (top allocation is {top_region:?})")
            }
            None => panic!("release of {region:?} with no live allocations"),
        }
    }

    pub(crate) fn top(&self) -> usize {
        self.top
    }

    pub(crate) fn peak(&self) -> usize {
        self.peak
    }

    pub(crate) fn reset_peak(&mut self) {
        self.peak = self.top;
    }

    pub(crate) fn live(&self) -> usize {
        self.frames.len()
    }
}
