use crate::memory::{Memory, Region};

/// Copies `src` into `dst` and insertion-sorts it there.
///
/// `src` is left untouched; both regions must have the same length.
pub fn insertion_copy_sort<M: Memory>(mem: &mut M, src: Region, dst: Region) {
    assert_eq!(src.len(), dst.len(), "insertion_copy_sort length mismatch");
    let n = src.len();
    if n == 0 {
        return;
    }
    let first = mem.read(src, 0);
    mem.write(dst, 0, first);
    for i in 1..n {
        let x = mem.read(src, i);
        let mut j = i;
        while j > 0 {
            let y = mem.read(dst, j - 1);
            if y <= x {
                break;
            }
            mem.write(dst, j, y);
            j -= 1;
        }
        mem.write(dst, j, x);
    }
}

/// Top-down binary merge sort of `data` in place, using the first
/// `data.len()` cells of `scratch` as working storage.
pub fn merge_sort<M: Memory>(mem: &mut M, data: Region, scratch: Region) {
    let n = data.len();
    assert!(scratch.len() >= n, "merge_sort scratch too small");
    let scratch = scratch.slice(0, n);
    mem.copy(data, scratch);
    split_merge(mem, data, scratch, 0, n);
}

/// Merge-sorts `src` into `dst`; `src` is clobbered.
pub fn merge_sort_into<M: Memory>(mem: &mut M, src: Region, dst: Region) {
    assert_eq!(src.len(), dst.len(), "merge_sort_into length mismatch");
    mem.copy(src, dst);
    split_merge(mem, dst, src, 0, src.len());
}

// Sorts `a[lo..hi]` using `b[lo..hi]`, which must hold the same items.
fn split_merge<M: Memory>(mem: &mut M, a: Region, b: Region, lo: usize, hi: usize) {
    if hi - lo < 2 {
        return;
    }
    let mid = lo + (hi - lo) / 2;
    split_merge(mem, b, a, lo, mid);
    split_merge(mem, b, a, mid, hi);
    merge(mem, b, a, lo, mid, hi);
}

// Merges the sorted runs `from[lo..mid]` and `from[mid..hi]` into `into[lo..hi]`.
fn merge<M: Memory>(mem: &mut M, from: Region, into: Region, lo: usize, mid: usize, hi: usize) {
    let (mut i, mut j) = (lo, mid);
    let mut left = mem.read(from, i);
    let mut right = mem.read(from, j);
    for k in lo..hi {
        if j >= hi || (i < mid && left <= right) {
            mem.write(into, k, left);
            i += 1;
            if i < mid {
                left = mem.read(from, i);
            }
        } else {
            mem.write(into, k, right);
            j += 1;
            if j < hi {
                right = mem.read(from, j);
            }
        }
    }
}
