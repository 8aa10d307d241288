use super::cursors::initial_bucket_cursors;
use super::layout::ColumnLayout;
use super::pivots::sample_pivots;
use super::small::insertion_copy_sort;
use super::transpose::skew_transpose;
use super::SortParams;
use crate::memory::{Memory, Region};
use crate::rng::Rng;

/// Sorts `src` into `dst` (equal lengths, disjoint). `src` is used as
/// scratch and its final contents are unspecified.
///
/// The buffer is viewed as `m = ceil(sqrt(n))` columns. Each column is
/// sorted recursively into `dst`, `m - 1` random pivots split the items
/// into `m` buckets, a skew transposition moves the buckets back into
/// `src` contiguously, and each bucket is sorted recursively into `dst`.
/// Single-value buckets of a degenerate pivot set are copied instead.
///
/// The auxiliary arrays of each level are allocated from `mem` and released
/// before returning.
pub fn square_sort<M: Memory>(mem: &mut M, src: Region, dst: Region, params: &SortParams, rng: &mut Rng) {
    assert_eq!(src.len(), dst.len(), "square_sort needs equally sized buffers");
    debug_assert!(
        src.base() + src.len() <= dst.base() || dst.base() + dst.len() <= src.base() || src.is_empty(),
        "square_sort buffers overlap"
    );
    let n = src.len();
    // a 2-item buffer forms a single full column, so it is never split
    if n <= params.cutoff().max(2) {
        insertion_copy_sort(mem, src, dst);
        return;
    }

    let layout = ColumnLayout::new(n);
    let cols = layout.store(mem);
    for c in 0..layout.count() {
        let start = mem.read(cols.start, c) as usize;
        let end = mem.read(cols.end, c) as usize;
        if start < end {
            square_sort(mem, src.slice(start, end), dst.slice(start, end), params, rng);
        }
    }

    let pivots = sample_pivots(mem, dst, &layout, rng, params);
    let buckets = initial_bucket_cursors(mem, dst, &layout, &pivots);
    skew_transpose(mem, dst, src, cols, &pivots, buckets, params.naive_threshold());

    let mut lo = 0;
    for g in 0..pivots.len() {
        let hi = mem.read(buckets.region, g) as usize;
        if hi > lo {
            let (from, to) = (src.slice(lo, hi), dst.slice(lo, hi));
            if pivots.is_single_value(mem, g) {
                mem.copy(from, to);
            } else {
                square_sort(mem, from, to, params, rng);
            }
        }
        lo = hi;
    }
    debug_assert_eq!(lo, n);

    buckets.release(mem);
    pivots.release(mem);
    cols.release(mem);
}
