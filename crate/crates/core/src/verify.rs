//! Oracles and statistical checks.
//!
//! Nothing here relies on the sorting routines for its reference answers:
//! sortedness is checked against the standard library sort, bucket sizes are
//! counted directly from the pivot values.

use std::collections::BTreeMap;
use std::f64::consts::E;
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::harness::IoRecord;
use crate::memory::{Memory, NativeMemory};
use crate::rng::Rng;
use crate::sort::{
    initial_bucket_cursors, naive_skew_transpose, sample_pivots, skew_transpose, ColumnLayout, PivotSet, SortParams,
};

/// First reason an output is not the sorted input.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Violation {
    LengthMismatch {
        input: usize,
        output: usize,
    },
    /// `output[index - 1] > output[index]`.
    Order {
        index: usize,
    },
    /// The output is ordered but differs from the sorted input at `index`.
    Multiset {
        index: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::LengthMismatch { input, output } => {
                write!(f, "length mismatch: input has {input} items, output {output}")
            }
            Violation::Order { index } => write!(f, "order violated at index {index}"),
            Violation::Multiset { index } => write!(f, "not a permutation of the input (first difference at {index})"),
        }
    }
}

impl std::error::Error for Violation {}

/// Passes iff `output` is non-decreasing and holds the same multiset as
/// `input`.
pub fn check_sorted_permutation(input: &[u64], output: &[u64]) -> Result<(), Violation> {
    if input.len() != output.len() {
        return Err(Violation::LengthMismatch {
            input: input.len(),
            output: output.len(),
        });
    }
    if let Some(i) = output.windows(2).position(|w| w[0] > w[1]) {
        return Err(Violation::Order { index: i + 1 });
    }
    let mut reference = input.to_vec();
    reference.sort();
    match reference.iter().zip(output).position(|(a, b)| a != b) {
        Some(index) => Err(Violation::Multiset { index }),
        None => Ok(()),
    }
}

// ---------------------------------------------------------------------------
// transposition differential test

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransposeFailure {
    pub trial: usize,
    /// Rerun with [`transpose_trial`] to reproduce.
    pub seed: u64,
    pub reason: String,
}

#[derive(Clone, Debug, Default)]
pub struct TransposeReport {
    pub trials: usize,
    pub failures: Vec<TransposeFailure>,
    /// Trials whose bucket count was 1.
    pub single_bucket: usize,
    /// Trials whose pivots all exceed every item.
    pub all_in_first: usize,
    pub degenerate: usize,
}

impl TransposeReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Shape of one differential trial, mostly for reporting coverage.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TrialShape {
    pub n: usize,
    pub buckets: usize,
    pub single_bucket: bool,
    pub all_in_first: bool,
    pub degenerate: bool,
}

struct TransposeRun {
    dst: Vec<u64>,
    col: Vec<u64>,
    buc: Vec<usize>,
}

fn transpose_once(columns: &[u64], finite: &[u64], degenerate: bool, threshold: Option<usize>) -> TransposeRun {
    let n = columns.len();
    let layout = ColumnLayout::new(n);
    let floor = columns.iter().copied().min().unwrap_or(0);
    let mut mem = NativeMemory::new();
    let src = mem.alloc(n);
    let dst = mem.alloc(n);
    mem.load(src, columns);
    let cols = layout.store(&mut mem);
    let pivots = PivotSet::store(&mut mem, finite, degenerate, floor);
    let buckets = initial_bucket_cursors(&mut mem, src, &layout, &pivots);
    match threshold {
        None => naive_skew_transpose(&mut mem, src, dst, cols, &pivots, buckets),
        Some(t) => skew_transpose(&mut mem, src, dst, cols, &pivots, buckets, t),
    }
    TransposeRun {
        dst: mem.snapshot(dst),
        col: mem.snapshot(cols.start),
        buc: buckets.to_vec(&mem),
    }
}

/// One randomized comparison of the recursive and the naive transposition
/// from identical initial state. Deterministic in `(seed, max_n)`.
pub fn transpose_trial(seed: u64, max_n: usize) -> Result<TrialShape, String> {
    assert!(max_n >= 1, "max_n must be positive");
    let mut rng = Rng::seed_from_u64(seed);
    let n = 1 + rng.index(max_n);
    let layout = ColumnLayout::new(n);
    let m = layout.count();

    // a small value range forces duplicates
    let range = match rng.index(3) {
        0 => 2 + rng.index(8) as u64,
        1 => n as u64,
        _ => 1 << 40,
    };
    let mut columns: Vec<u64> = (0..n).map(|_| rng.range_inclusive(1, range)).collect();
    for c in 0..m {
        columns[layout.span(c)].sort_unstable();
    }
    let max_item = *columns.iter().max().expect("n >= 1");

    let mut shape = TrialShape {
        n,
        ..TrialShape::default()
    };
    let finite: Vec<u64> = match rng.index(8) {
        0 => {
            shape.single_bucket = true;
            Vec::new()
        }
        1 => {
            shape.all_in_first = true;
            (1..=(m as u64).saturating_sub(1)).map(|i| max_item + i).collect()
        }
        2 => {
            shape.degenerate = true;
            let mut p: Vec<u64> = (0..m.saturating_sub(1)).map(|_| columns[rng.index(n)]).collect();
            p.sort_unstable();
            p
        }
        _ => {
            // distinct pivots, the bucket count not necessarily equal to m
            let k = 1 + rng.index(2 * m);
            let mut p: Vec<u64> = (0..k - 1).map(|_| rng.range_inclusive(0, range + 1)).collect();
            p.sort_unstable();
            p.dedup();
            p
        }
    };
    shape.buckets = finite.len() + 1;
    let threshold = 2 + rng.index(7);

    let naive = transpose_once(&columns, &finite, shape.degenerate, None);
    let recursive = transpose_once(&columns, &finite, shape.degenerate, Some(threshold));
    if naive.dst != recursive.dst {
        let i = naive
            .dst
            .iter()
            .zip(&recursive.dst)
            .position(|(a, b)| a != b)
            .unwrap_or(0);
        return Err(format!("destinations differ at {i} (n={n}, threshold={threshold})"));
    }
    if naive.col != recursive.col {
        return Err(format!("column cursors differ (n={n}, threshold={threshold})"));
    }
    if naive.buc != recursive.buc {
        return Err(format!("bucket cursors differ (n={n}, threshold={threshold})"));
    }
    let expected_col: Vec<u64> = layout.ends().into_iter().map(|e| e as u64).collect();
    if naive.col != expected_col {
        return Err(format!("columns not fully consumed (n={n})"));
    }
    if naive.buc.last() != Some(&n) {
        return Err(format!("last bucket cursor is {:?}, expected {n}", naive.buc.last()));
    }
    if shape.single_bucket && naive.dst != columns {
        return Err(format!("single bucket is not the column concatenation (n={n})"));
    }
    if shape.all_in_first && naive.buc.iter().any(|&b| b != n) {
        return Err(format!("items escaped the first bucket (n={n})"));
    }
    let mut moved = naive.dst.clone();
    moved.sort_unstable();
    let mut orig = columns.clone();
    orig.sort_unstable();
    if moved != orig {
        return Err(format!("transposition lost or duplicated items (n={n})"));
    }
    Ok(shape)
}

/// Runs `trials` differential trials with `n <= max_n`.
pub fn transpose_equivalence_test(trials: usize, max_n: usize, seed: u64) -> TransposeReport {
    assert!(trials >= 1, "at least one trial is required");
    let mut master = Rng::seed_from_u64(seed);
    let seeds: Vec<u64> = (0..trials).map(|_| master.next_u64()).collect();
    let outcomes: Vec<_> = seeds.par_iter().map(|&s| transpose_trial(s, max_n)).collect();
    let mut report = TransposeReport {
        trials,
        ..TransposeReport::default()
    };
    for (trial, (outcome, &seed)) in outcomes.into_iter().zip(&seeds).enumerate() {
        match outcome {
            Ok(shape) => {
                report.single_bucket += usize::from(shape.buckets == 1);
                report.all_in_first += usize::from(shape.all_in_first);
                report.degenerate += usize::from(shape.degenerate);
            }
            Err(reason) => report.failures.push(TransposeFailure { trial, seed, reason }),
        }
    }
    report
}

// ---------------------------------------------------------------------------
// bucket distribution

pub const UPPER_TAIL_T: [u32; 3] = [1, 2, 3];
pub const LOWER_TAIL_S: [u32; 2] = [2, 5];
/// Standard errors of slack granted to every empirical estimate.
pub const SIGMA_SLACK: f64 = 3.0;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TailError {
    #[error("bucket statistics need n >= 100, got {0}")]
    SizeTooSmall(usize),
    #[error("bucket statistics need at least 1000 trials, got {0}")]
    TooFewTrials(usize),
}

/// Empirical frequency of an event compared against an upper bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TailCheck {
    /// `t` for upper tails, `s` for lower tails.
    pub param: u32,
    pub frequency: f64,
    pub sigma: f64,
    pub bound: f64,
    pub pass: bool,
}

impl TailCheck {
    fn new(param: u32, hits: usize, trials: usize, bound: f64) -> Self {
        let frequency = hits as f64 / trials as f64;
        let sigma = (frequency * (1.0 - frequency) / trials as f64).sqrt();
        Self {
            param,
            frequency,
            sigma,
            bound,
            pass: frequency <= bound + SIGMA_SLACK * sigma,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TailReport {
    pub n: usize,
    pub trials: usize,
    /// `Pr[n_1 >= t sqrt(n)] <= e^(-0.9 t + 0.1)`.
    pub upper: Vec<TailCheck>,
    /// `Pr[n_1 <= s] <= e^2 s / sqrt(n)`.
    pub lower: Vec<TailCheck>,
    /// Sample mean of `sum n_i log2 n_i`.
    pub entropy_mean: f64,
    /// Standard error of `entropy_mean`.
    pub entropy_sigma: f64,
    /// `n log2(n) / 2 + 4 e n`.
    pub entropy_bound: f64,
    pub entropy_pass: bool,
    pub rounds_mean: f64,
    /// `e^2`, applied without slack.
    pub rounds_bound: f64,
    pub rounds_pass: bool,
    /// Trials that ended with a degenerate pivot set; excluded from the
    /// statistics above.
    pub degenerate: usize,
    /// Whether the bucket sizes summed to `n` in every trial.
    pub partition_pass: bool,
}

impl TailReport {
    pub fn passed(&self) -> bool {
        self.upper.iter().chain(&self.lower).all(|c| c.pass)
            && self.entropy_pass
            && self.rounds_pass
            && self.partition_pass
            && self.degenerate == 0
    }
}

struct TailSample {
    first: usize,
    entropy: f64,
    rounds: u32,
    partition_ok: bool,
    degenerate: bool,
}

/// Sizes of the buckets `[p_{g-1}, p_g)` of `sorted_items`, with `p_{-1} =
/// -inf` and `p_{k-1} = +inf`.
fn bucket_sizes(sorted_items: &[u64], pivots: &[u64]) -> Vec<usize> {
    let mut sizes = Vec::with_capacity(pivots.len() + 1);
    let mut below = 0;
    for &p in pivots {
        let upto = sorted_items.partition_point(|&x| x < p);
        sizes.push(upto - below);
        below = upto;
    }
    sizes.push(sorted_items.len() - below);
    sizes
}

fn tail_sample(n: usize, seed: u64, trial: u64, params: &SortParams) -> TailSample {
    let mut rng = Rng::for_stream(seed, trial);
    let layout = ColumnLayout::new(n);
    let mut items: Vec<u64> = (1..=n as u64).collect();
    rng.shuffle(&mut items);
    for c in 0..layout.count() {
        items[layout.span(c)].sort_unstable();
    }
    let mut mem = NativeMemory::with_capacity(2 * n);
    let dst = mem.alloc(n);
    mem.load(dst, &items);
    let pivots = sample_pivots(&mut mem, dst, &layout, &mut rng, params);
    let values = pivots.finite_values(&mem);
    let degenerate = pivots.is_degenerate();
    let rounds = pivots.rounds();
    pivots.release(&mut mem);

    items.sort_unstable();
    let sizes = bucket_sizes(&items, &values);
    let entropy = sizes
        .iter()
        .filter(|&&s| s > 0)
        .map(|&s| s as f64 * (s as f64).log2())
        .sum();
    TailSample {
        first: sizes[0],
        entropy,
        rounds,
        partition_ok: sizes.iter().sum::<usize>() == n,
        degenerate,
    }
}

/// Samples pivot sets over `trials` arrays of `n` distinct items and checks
/// the bucket-size tail bounds, the expected entropy bound and the expected
/// number of sampling rounds.
pub fn bucket_tail_stats(n: usize, trials: usize, seed: u64) -> Result<TailReport, TailError> {
    if n < 100 {
        return Err(TailError::SizeTooSmall(n));
    }
    if trials < 1000 {
        return Err(TailError::TooFewTrials(trials));
    }
    let params = SortParams::default();
    let samples: Vec<TailSample> = (0..trials as u64)
        .into_par_iter()
        .map(|t| tail_sample(n, seed, t, &params))
        .collect();

    let partition_pass = samples.iter().all(|s| s.partition_ok);
    let degenerate = samples.iter().filter(|s| s.degenerate).count();
    let kept: Vec<&TailSample> = samples.iter().filter(|s| !s.degenerate).collect();
    let used = kept.len().max(1);
    let root = (n as f64).sqrt();

    let upper = UPPER_TAIL_T
        .iter()
        .map(|&t| {
            let hits = kept.iter().filter(|s| s.first as f64 >= t as f64 * root).count();
            TailCheck::new(t, hits, used, (-0.9 * t as f64 + 0.1).exp())
        })
        .collect();
    let lower = LOWER_TAIL_S
        .iter()
        .map(|&s| {
            let hits = kept.iter().filter(|x| x.first <= s as usize).count();
            TailCheck::new(s, hits, used, E * E * s as f64 / root)
        })
        .collect();

    let count = used as f64;
    let entropy_mean = kept.iter().map(|s| s.entropy).sum::<f64>() / count;
    let variance = if kept.len() > 1 {
        kept.iter().map(|s| (s.entropy - entropy_mean).powi(2)).sum::<f64>() / (count - 1.0)
    } else {
        0.0
    };
    let entropy_sigma = (variance / count).sqrt();
    let nf = n as f64;
    let entropy_bound = 0.5 * nf * nf.log2() + 4.0 * E * nf;

    // rounds are averaged over every trial, degenerate ones included
    let rounds_mean = samples.iter().map(|s| s.rounds as f64).sum::<f64>() / trials as f64;
    let rounds_bound = E * E;

    Ok(TailReport {
        n,
        trials,
        upper,
        lower,
        entropy_mean,
        entropy_sigma,
        entropy_bound,
        entropy_pass: entropy_mean <= entropy_bound + SIGMA_SLACK * entropy_sigma,
        rounds_mean,
        rounds_bound,
        rounds_pass: rounds_mean <= rounds_bound,
        degenerate,
        partition_pass,
    })
}

// ---------------------------------------------------------------------------
// IO constant fitting

/// Minimum distinct sizes per `(B, M)` group for a fit.
pub const MIN_FIT_SIZES: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IoFit {
    pub min: f64,
    pub max: f64,
    /// Mean over all records of the group.
    pub mean: f64,
    pub sizes: usize,
}

impl IoFit {
    /// `max / min`.
    pub fn spread(&self) -> f64 {
        self.max / self.min
    }
}

#[derive(Clone, Copy, Debug, Error, PartialEq, Eq)]
pub enum FitError {
    #[error("only {found} distinct sizes, need at least {MIN_FIT_SIZES}")]
    TooFewSizes { found: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroupFit {
    pub block: usize,
    pub cache: usize,
    pub fit: Result<IoFit, FitError>,
}

/// Extrema and mean of the ratio column per `(B, M)`, ordered by `(B, M)`.
pub fn fit_io_constant(records: &[IoRecord]) -> Vec<GroupFit> {
    let mut groups: BTreeMap<(usize, usize), Vec<&IoRecord>> = BTreeMap::new();
    for r in records {
        groups.entry((r.block, r.cache)).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|((block, cache), rows)| {
            let mut sizes: Vec<usize> = rows.iter().map(|r| r.size).collect();
            sizes.sort_unstable();
            sizes.dedup();
            let fit = if sizes.len() < MIN_FIT_SIZES {
                Err(FitError::TooFewSizes { found: sizes.len() })
            } else {
                let ratios = rows.iter().map(|r| r.ratio);
                Ok(IoFit {
                    min: ratios.clone().fold(f64::INFINITY, f64::min),
                    max: ratios.clone().fold(f64::NEG_INFINITY, f64::max),
                    mean: ratios.sum::<f64>() / rows.len() as f64,
                    sizes: sizes.len(),
                })
            };
            GroupFit { block, cache, fit }
        })
        .collect()
}
