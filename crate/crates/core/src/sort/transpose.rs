use std::ops::Range;

use super::cursors::BucketCursors;
use super::layout::ColumnCursors;
use super::pivots::PivotSet;
use crate::memory::{Memory, Region};

/// Moves every item of the sorted columns of `src` into its bucket in `dst`.
///
/// Buckets are visited in ascending order and, for each bucket, the columns
/// left to right; within a bucket items therefore appear in column order.
/// Column and bucket cursors are advanced in memory.
pub fn naive_skew_transpose<M: Memory>(
    mem: &mut M,
    src: Region,
    dst: Region,
    cols: ColumnCursors,
    pivots: &PivotSet,
    buckets: BucketCursors,
) {
    let mut ctx = Transpose::new(mem, src, dst, cols, pivots, buckets, usize::MAX);
    ctx.naive(0..cols.count(), 0..pivots.len());
}

/// Cache-oblivious skew transposition.
///
/// Splits (columns x buckets) into quadrants and recurses on them in the
/// order (left, low), (right, low), (left, high), (right, high) until one
/// side has fewer than `naive_threshold` entries. The result, including all
/// final cursor values, is identical to [`naive_skew_transpose`].
pub fn skew_transpose<M: Memory>(
    mem: &mut M,
    src: Region,
    dst: Region,
    cols: ColumnCursors,
    pivots: &PivotSet,
    buckets: BucketCursors,
    naive_threshold: usize,
) {
    skew_transpose_traced(mem, src, dst, cols, pivots, buckets, naive_threshold, &mut |_, _| {});
}

/// [`skew_transpose`] reporting `(columns, buckets)` of every recursive call.
#[allow(clippy::too_many_arguments)]
pub fn skew_transpose_traced<M: Memory>(
    mem: &mut M,
    src: Region,
    dst: Region,
    cols: ColumnCursors,
    pivots: &PivotSet,
    buckets: BucketCursors,
    naive_threshold: usize,
    trace: &mut dyn FnMut(usize, usize),
) {
    assert!(naive_threshold >= 2, "naive threshold must be at least 2");
    let mut ctx = Transpose::new(mem, src, dst, cols, pivots, buckets, naive_threshold);
    ctx.recurse(0..cols.count(), 0..pivots.len(), trace);
}

struct Transpose<'a, M: Memory> {
    mem: &'a mut M,
    src: Region,
    dst: Region,
    col: Region,
    col_end: Region,
    pivots: &'a PivotSet,
    buc: Region,
    threshold: usize,
    // first slot of the following bucket, for overflow checks in debug builds
    limits: Vec<usize>,
}

impl<'a, M: Memory> Transpose<'a, M> {
    fn new(
        mem: &'a mut M,
        src: Region,
        dst: Region,
        cols: ColumnCursors,
        pivots: &'a PivotSet,
        buckets: BucketCursors,
        threshold: usize,
    ) -> Self {
        assert_eq!(
            cols.start.len(),
            cols.end.len(),
            "column cursor arrays differ in length"
        );
        assert_eq!(buckets.len(), pivots.len(), "one bucket cursor per pivot expected");
        let limits = if cfg!(debug_assertions) {
            let start = buckets.to_vec(&*mem);
            let mut limits: Vec<usize> = start.iter().skip(1).copied().collect();
            limits.push(dst.len());
            limits
        } else {
            Vec::new()
        };
        Self {
            mem,
            src,
            dst,
            col: cols.start,
            col_end: cols.end,
            pivots,
            buc: buckets.region,
            threshold,
            limits,
        }
    }

    fn recurse(&mut self, cols: Range<usize>, bkts: Range<usize>, trace: &mut dyn FnMut(usize, usize)) {
        let (l, k) = (cols.len(), bkts.len());
        trace(l, k);
        if l < self.threshold || k < self.threshold {
            self.naive(cols, bkts);
            return;
        }
        let col_mid = cols.start + l / 2;
        let bkt_mid = bkts.start + k / 2;
        self.recurse(cols.start..col_mid, bkts.start..bkt_mid, trace);
        self.recurse(col_mid..cols.end, bkts.start..bkt_mid, trace);
        self.recurse(cols.start..col_mid, bkt_mid..bkts.end, trace);
        self.recurse(col_mid..cols.end, bkt_mid..bkts.end, trace);
    }

    fn naive(&mut self, cols: Range<usize>, bkts: Range<usize>) {
        for g in bkts {
            let bound = self.pivots.bound(self.mem, g);
            let first = self.mem.read(self.buc, g) as usize;
            let mut out = first;
            for c in cols.clone() {
                let begin = self.mem.read(self.col, c) as usize;
                let end = self.mem.read(self.col_end, c) as usize;
                let mut pos = begin;
                while pos < end {
                    let x = self.mem.read(self.src, pos);
                    if !bound.admits(x) {
                        break;
                    }
                    debug_assert!(
                        self.limits.is_empty() || out < self.limits[g],
                        "bucket {g} overflows into its successor at slot {out}"
                    );
                    self.mem.write(self.dst, out, x);
                    out += 1;
                    pos += 1;
                }
                if pos != begin {
                    self.mem.write(self.col, c, pos as u64);
                }
            }
            if out != first {
                self.mem.write(self.buc, g, out as u64);
            }
        }
    }
}
