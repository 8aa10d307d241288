use std::ops::Range;

use super::ceil_sqrt;
use crate::memory::{Memory, Region};

/// The `m = ceil(sqrt(n))` columns an `n`-item buffer is cut into.
///
/// Every column except possibly the trailing ones holds `m` items; trailing
/// columns may be short or empty (e.g. `n = 10` gives sizes 4, 4, 2, 0).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ColumnLayout {
    len: usize,
    count: usize,
}

impl ColumnLayout {
    pub fn new(len: usize) -> Self {
        assert!(len >= 1, "column layout of an empty buffer");
        Self {
            len,
            count: ceil_sqrt(len),
        }
    }

    /// Number of items `n` described by the layout.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Number of columns `m`.
    pub fn count(&self) -> usize {
        self.count
    }

    pub fn start(&self, i: usize) -> usize {
        (i * self.count).min(self.len)
    }

    pub fn end(&self, i: usize) -> usize {
        ((i + 1) * self.count).min(self.len)
    }

    pub fn span(&self, i: usize) -> Range<usize> {
        self.start(i)..self.end(i)
    }

    pub fn starts(&self) -> Vec<usize> {
        (0..self.count).map(|i| self.start(i)).collect()
    }

    pub fn ends(&self) -> Vec<usize> {
        (0..self.count).map(|i| self.end(i)).collect()
    }

    /// Materializes the start and end arrays in `mem`.
    pub fn store<M: Memory>(&self, mem: &mut M) -> ColumnCursors {
        let start = mem.alloc(self.count);
        let end = mem.alloc(self.count);
        for i in 0..self.count {
            mem.write(start, i, self.start(i) as u64);
            mem.write(end, i, self.end(i) as u64);
        }
        ColumnCursors { start, end }
    }
}

/// Per-column read cursors and their exclusive bounds, held in memory.
///
/// Skew transposition advances `start[i]` towards `end[i]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ColumnCursors {
    pub start: Region,
    pub end: Region,
}

impl ColumnCursors {
    /// Copies arbitrary cursor values into freshly allocated arrays.
    pub fn from_slices<M: Memory>(mem: &mut M, start: &[usize], end: &[usize]) -> Self {
        assert_eq!(start.len(), end.len());
        let s = mem.alloc(start.len());
        let e = mem.alloc(end.len());
        for (i, (&a, &b)) in start.iter().zip(end).enumerate() {
            assert!(a <= b, "column {i} starts after it ends");
            mem.write(s, i, a as u64);
            mem.write(e, i, b as u64);
        }
        Self { start: s, end: e }
    }

    pub fn count(&self) -> usize {
        self.start.len()
    }

    /// Releases both arrays; they must be the two most recent allocations.
    pub fn release<M: Memory>(self, mem: &mut M) {
        mem.release(self.end);
        mem.release(self.start);
    }
}
