use super::layout::ColumnLayout;
use super::pivots::PivotSet;
use crate::memory::{Memory, Region};

/// Per-bucket write positions into the transposition destination.
///
/// Before transposition `buc[g]` is the first slot of bucket `g`; a full
/// transposition leaves each cursor at the start of the following bucket.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BucketCursors {
    pub region: Region,
}

impl BucketCursors {
    pub fn from_slice<M: Memory>(mem: &mut M, positions: &[usize]) -> Self {
        let region = mem.alloc(positions.len());
        for (g, &p) in positions.iter().enumerate() {
            mem.write(region, g, p as u64);
        }
        Self { region }
    }

    pub fn len(&self) -> usize {
        self.region.len()
    }

    pub fn is_empty(&self) -> bool {
        self.region.is_empty()
    }

    pub fn to_vec<M: Memory>(&self, mem: &M) -> Vec<usize> {
        mem.snapshot(self.region).into_iter().map(|x| x as usize).collect()
    }

    pub fn release<M: Memory>(self, mem: &mut M) {
        mem.release(self.region);
    }
}

/// Computes the start of every bucket of `dst` under `pivots`.
///
/// Each sorted column is scanned together with the sorted pivot list, so the
/// bucket of every item is found without searching. Sizes are accumulated in
/// the cursor array and then prefix-summed in place.
pub fn initial_bucket_cursors<M: Memory>(
    mem: &mut M,
    dst: Region,
    layout: &ColumnLayout,
    pivots: &PivotSet,
) -> BucketCursors {
    let k = pivots.len();
    let buc = mem.alloc(k);
    for g in 0..k {
        mem.write(buc, g, 0);
    }
    for c in 0..layout.count() {
        let span = layout.span(c);
        if span.is_empty() {
            continue;
        }
        let mut g = 0;
        let mut bound = pivots.bound(mem, 0);
        let mut run = 0u64;
        for pos in span {
            let x = mem.read(dst, pos);
            while !bound.admits(x) {
                if run > 0 {
                    add(mem, buc, g, run);
                    run = 0;
                }
                g += 1;
                bound = pivots.bound(mem, g);
            }
            run += 1;
        }
        add(mem, buc, g, run);
    }
    let mut start = 0;
    for g in 0..k {
        let size = mem.read(buc, g);
        mem.write(buc, g, start);
        start += size;
    }
    debug_assert_eq!(start as usize, dst.len());
    BucketCursors { region: buc }
}

#[inline]
fn add<M: Memory>(mem: &mut M, buc: Region, g: usize, by: u64) {
    let v = mem.read(buc, g);
    mem.write(buc, g, v + by);
}

/// Bucket spans recovered from the cursors left by a full transposition:
/// `[(0, buc[0]), (buc[0], buc[1]), ...]`.
pub fn bucket_ranges(after: &[usize]) -> Vec<(usize, usize)> {
    let mut lo = 0;
    after
        .iter()
        .map(|&hi| {
            assert!(hi >= lo, "bucket cursors are not monotone: {after:?}");
            let range = (lo, hi);
            lo = hi;
            range
        })
        .collect()
}
