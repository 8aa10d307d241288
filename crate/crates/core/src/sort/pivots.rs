use super::layout::ColumnLayout;
use super::small::merge_sort;
use super::SortParams;
use crate::memory::{Memory, Region};
use crate::rng::Rng;

/// Pivots `p_0 <= ... <= p_{k-2}` followed by an implicit `+inf` in slot `k-1`.
///
/// Bucket `g` holds the items `x` with `p_{g-1} <= x < p_g` (`p_{-1} = -inf`).
/// A degenerate set may repeat values. There, a pivot equal to its
/// predecessor (or, for `g = 0`, to the minimum `floor` of the sampled
/// buffer) closes a single-value bucket `{p_g}`, and the buckets after it
/// start strictly above `p_g`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PivotSet {
    region: Region,
    rounds: u32,
    degenerate: bool,
    floor: u64,
}

/// Upper edge of one bucket.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Bound {
    value: u64,
    inclusive: bool,
    infinite: bool,
}

impl Bound {
    #[inline]
    pub(crate) fn admits(&self, x: u64) -> bool {
        self.infinite || x < self.value || (self.inclusive && x == self.value)
    }
}

impl PivotSet {
    /// Stores explicit finite pivots (plus the sentinel slot) in `mem`.
    pub fn store<M: Memory>(mem: &mut M, finite: &[u64], degenerate: bool, floor: u64) -> Self {
        let region = mem.alloc(finite.len() + 1);
        mem.load(region, finite);
        mem.write(region, finite.len(), u64::MAX);
        Self {
            region,
            rounds: 0,
            degenerate,
            floor,
        }
    }

    /// Number of buckets `k` (finite pivots plus the sentinel).
    pub fn len(&self) -> usize {
        self.region.len()
    }

    pub fn is_empty(&self) -> bool {
        self.region.is_empty()
    }

    pub fn region(&self) -> Region {
        self.region
    }

    /// Sampling rounds consumed; zero for pivots built with [`PivotSet::store`].
    pub fn rounds(&self) -> u32 {
        self.rounds
    }

    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    /// Smallest item of the buffer the pivots were drawn from.
    pub fn floor(&self) -> u64 {
        self.floor
    }

    /// The finite pivot values, read without touching cache state.
    pub fn finite_values<M: Memory>(&self, mem: &M) -> Vec<u64> {
        (0..self.len() - 1).map(|g| mem.peek(self.region, g)).collect()
    }

    pub fn release<M: Memory>(self, mem: &mut M) {
        mem.release(self.region);
    }

    pub(crate) fn bound<M: Memory>(&self, mem: &mut M, g: usize) -> Bound {
        if g + 1 == self.len() {
            return Bound {
                value: u64::MAX,
                inclusive: true,
                infinite: true,
            };
        }
        let value = mem.read(self.region, g);
        let inclusive = self.degenerate && {
            let prev = if g == 0 {
                self.floor
            } else {
                mem.read(self.region, g - 1)
            };
            prev == value
        };
        Bound {
            value,
            inclusive,
            infinite: false,
        }
    }

    /// Whether bucket `g` can only ever contain copies of one value.
    pub fn is_single_value<M: Memory>(&self, mem: &mut M, g: usize) -> bool {
        self.degenerate && g + 1 < self.len() && self.bound(mem, g).inclusive
    }
}

/// Draws `m - 1` pivots from `dst`, whose columns (per `layout`) are sorted.
///
/// Each round samples indices uniformly with repetition, merge-sorts the
/// sample and accepts it when all values are distinct and the smallest one
/// exceeds `min(dst)`. `min(dst)` is taken from the column heads. After
/// `resample_cap` failed rounds the last sample is kept and the set is
/// flagged degenerate.
pub fn sample_pivots<M: Memory>(
    mem: &mut M,
    dst: Region,
    layout: &ColumnLayout,
    rng: &mut Rng,
    params: &SortParams,
) -> PivotSet {
    let n = dst.len();
    assert!(n >= 2, "pivot sampling needs at least two items, got {n}");
    assert_eq!(layout.len(), n, "layout does not describe the buffer");
    let k = layout.count();
    let samples = k - 1;

    let mut floor = u64::MAX;
    for c in 0..k {
        let start = layout.start(c);
        if start < layout.end(c) {
            floor = floor.min(mem.read(dst, start));
        }
    }

    let region = mem.alloc(k);
    let scratch = mem.alloc(samples);
    let sample = region.slice(0, samples);
    let mut rounds = 0;
    let mut accepted = false;
    while rounds < params.resample_cap() {
        rounds += 1;
        for t in 0..samples {
            let v = mem.read(dst, rng.index(n));
            mem.write(sample, t, v);
        }
        merge_sort(mem, sample, scratch);
        if acceptable(mem, sample, floor) {
            accepted = true;
            break;
        }
    }
    mem.release(scratch);
    mem.write(region, samples, u64::MAX);
    PivotSet {
        region,
        rounds,
        degenerate: !accepted,
        floor,
    }
}

fn acceptable<M: Memory>(mem: &mut M, sorted: Region, floor: u64) -> bool {
    let mut prev = mem.read(sorted, 0);
    if prev <= floor {
        return false;
    }
    for t in 1..sorted.len() {
        let v = mem.read(sorted, t);
        if v == prev {
            return false;
        }
        prev = v;
    }
    true
}
