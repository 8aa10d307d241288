use std::fmt;
use std::time::Instant;

use thiserror::Error;

use super::inputs::{generate_input, InputDistribution};
use crate::memory::{CacheConfig, Memory, NativeMemory, SimMemory};
use crate::rng::Rng;
use crate::sort::{
    initial_bucket_cursors, merge_sort_into, sample_pivots, skew_transpose, square_sort, ColumnLayout, SortParams,
};
use crate::verify::{check_sorted_permutation, Violation};

/// Sorting routines the harness can time.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, clap::ValueEnum)]
pub enum Algorithm {
    #[value(name = "squaresort")]
    SquareSort,
    /// Top-down binary merge sort over the same memory interface.
    #[value(name = "mergesort-baseline")]
    MergeSort,
    /// The standard library's unstable slice sort (native only).
    #[value(name = "host-library-sort")]
    HostSort,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::SquareSort, Algorithm::MergeSort, Algorithm::HostSort];

    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::SquareSort => "squaresort",
            Algorithm::MergeSort => "mergesort-baseline",
            Algorithm::HostSort => "host-library-sort",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// What an IO trial measures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, clap::ValueEnum)]
pub enum IoScope {
    /// SquareSort end to end.
    FullSort,
    /// One skew transposition of prepared sorted columns.
    TransposeOnly,
    /// The merge-sort baseline end to end, as a contrast series.
    MergeBaseline,
}

#[derive(Debug, Error)]
pub enum TrialError {
    #[error("trial size must be at least 2, got {0}")]
    TooSmall(usize),
    #[error("repeats must be at least 1")]
    NoRepeats,
    #[error("cache M={cache}, B={block} violates the tall-cache assumption M >= B^2")]
    NotTallCache { cache: usize, block: usize },
    #[error("{algo} produced a wrong result on {dist} n={size} seed={seed}: {violation}")]
    Oracle {
        algo: String,
        dist: InputDistribution,
        size: usize,
        seed: u64,
        violation: Violation,
    },
    #[error("timer reported zero elapsed time for {algo} n={size}")]
    ZeroTiming { algo: Algorithm, size: usize },
}

/// Mean wall-clock time of one (algorithm, distribution, size) cell.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchRecord {
    pub algo: Algorithm,
    pub dist: InputDistribution,
    pub size: usize,
    pub time_ns: f64,
    pub median_ns: f64,
    /// `time_ns / (size * log2(size))`.
    pub norm: f64,
}

impl BenchRecord {
    fn from_samples(algo: Algorithm, dist: InputDistribution, size: usize, samples: &[f64]) -> Self {
        let time_ns = samples.iter().sum::<f64>() / samples.len() as f64;
        let mut sorted = samples.to_vec();
        sorted.sort_by(f64::total_cmp);
        let mid = sorted.len() / 2;
        let median_ns = if sorted.len() % 2 == 1 {
            sorted[mid]
        } else {
            (sorted[mid - 1] + sorted[mid]) / 2.0
        };
        Self {
            algo,
            dist,
            size,
            time_ns,
            median_ns,
            norm: normalized_time(time_ns, size),
        }
    }
}

pub fn normalized_time(time_ns: f64, size: usize) -> f64 {
    let n = size as f64;
    time_ns / (n * n.log2())
}

/// Block transfers of one simulated run.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct IoRecord {
    pub size: usize,
    #[serde(rename = "B")]
    pub block: usize,
    #[serde(rename = "M")]
    pub cache: usize,
    #[serde(rename = "io")]
    pub io_total: u64,
    /// `io / ((n/B) * max(1, log_{M/B} n))` for sorts, `io / (1 + n/B)` for
    /// a lone transposition.
    pub ratio: f64,
    pub seed: u64,
}

fn time_one(
    algo: Algorithm,
    dist: InputDistribution,
    input: &[u64],
    seed: u64,
    params: &SortParams,
    rng: &mut Rng,
) -> Result<f64, TrialError> {
    let n = input.len();
    let (elapsed, output) = match algo {
        Algorithm::HostSort => {
            let mut v = input.to_vec();
            let start = Instant::now();
            v.sort_unstable();
            (start.elapsed(), v)
        }
        Algorithm::SquareSort | Algorithm::MergeSort => {
            let mut mem = NativeMemory::with_capacity(2 * n + 64);
            let src = mem.alloc(n);
            let dst = mem.alloc(n);
            mem.load(src, input);
            let start = Instant::now();
            if algo == Algorithm::SquareSort {
                square_sort(&mut mem, src, dst, params, rng);
            } else {
                merge_sort_into(&mut mem, src, dst);
            }
            (start.elapsed(), mem.snapshot(dst))
        }
    };
    check_sorted_permutation(input, &output).map_err(|violation| TrialError::Oracle {
        algo: algo.to_string(),
        dist,
        size: n,
        seed,
        violation,
    })?;
    let ns = elapsed.as_nanos();
    if ns == 0 {
        return Err(TrialError::ZeroTiming { algo, size: n });
    }
    Ok(ns as f64)
}

fn time_samples(
    algo: Algorithm,
    dist: InputDistribution,
    n: usize,
    seed: u64,
    params: &SortParams,
    repeats: usize,
) -> Result<Vec<f64>, TrialError> {
    if n < 2 {
        return Err(TrialError::TooSmall(n));
    }
    if repeats == 0 {
        return Err(TrialError::NoRepeats);
    }
    let input = generate_input(dist, n, seed);
    (0..repeats)
        .map(|r| {
            let mut rng = Rng::for_stream(seed, r as u64);
            time_one(algo, dist, &input, seed, params, &mut rng)
        })
        .collect()
}

/// Times `repeats` sorts of one generated instance on the native backend.
/// Every output is checked by the oracle before the record is produced.
pub fn run_time_trial(
    algo: Algorithm,
    dist: InputDistribution,
    n: usize,
    seed: u64,
    params: &SortParams,
    repeats: usize,
) -> Result<BenchRecord, TrialError> {
    let samples = time_samples(algo, dist, n, seed, params, repeats)?;
    Ok(BenchRecord::from_samples(algo, dist, n, &samples))
}

/// Like [`run_time_trial`] but pools the samples of several seeds (one
/// instance per seed) into a single record.
pub fn run_bench(
    algo: Algorithm,
    dist: InputDistribution,
    n: usize,
    seeds: &[u64],
    params: &SortParams,
    repeats: usize,
) -> Result<BenchRecord, TrialError> {
    let mut samples = Vec::with_capacity(seeds.len() * repeats);
    for &seed in seeds {
        samples.extend(time_samples(algo, dist, n, seed, params, repeats)?);
    }
    if samples.is_empty() {
        return Err(TrialError::NoRepeats);
    }
    Ok(BenchRecord::from_samples(algo, dist, n, &samples))
}

/// Counts block transfers of one run on a [`SimMemory`] with `config`.
///
/// Inputs are random permutations of `1..=n`. Setup (loading the input and,
/// for [`IoScope::TransposeOnly`], sorting the columns and choosing pivots)
/// happens before the cache is flushed, emptied and the counters zeroed, so
/// the measurement starts cold. Dirty blocks left at the end are written back
/// and counted.
pub fn run_io_trial(
    n: usize,
    config: CacheConfig,
    seed: u64,
    params: &SortParams,
    scope: IoScope,
    allow_short_cache: bool,
) -> Result<IoRecord, TrialError> {
    if !config.is_tall() && !allow_short_cache {
        return Err(TrialError::NotTallCache {
            cache: config.cache(),
            block: config.block(),
        });
    }
    if n < 2 {
        return Err(TrialError::TooSmall(n));
    }
    let input = generate_input(InputDistribution::Permutation, n, seed);
    let mut rng = Rng::for_stream(seed, 1);
    let mut mem = SimMemory::new(config);
    let src = mem.alloc(n);
    let dst = mem.alloc(n);

    let (io, output) = match scope {
        IoScope::FullSort | IoScope::MergeBaseline => {
            mem.load(src, &input);
            mem.evict_all();
            mem.reset_stats();
            if scope == IoScope::FullSort {
                square_sort(&mut mem, src, dst, params, &mut rng);
            } else {
                merge_sort_into(&mut mem, src, dst);
            }
            (mem.stats(), mem.snapshot(dst))
        }
        IoScope::TransposeOnly => {
            let layout = ColumnLayout::new(n);
            let mut columns = input.clone();
            for c in 0..layout.count() {
                columns[layout.span(c)].sort_unstable();
            }
            mem.load(src, &columns);
            let cols = layout.store(&mut mem);
            let pivots = sample_pivots(&mut mem, src, &layout, &mut rng, params);
            let buckets = initial_bucket_cursors(&mut mem, src, &layout, &pivots);
            mem.evict_all();
            mem.reset_stats();
            skew_transpose(&mut mem, src, dst, cols, &pivots, buckets, params.naive_threshold());
            let io = mem.stats();
            // sorting each bucket in place must give the sorted input
            let ends = buckets.to_vec(&mem);
            let mut out = mem.snapshot(dst);
            let mut lo = 0;
            for hi in ends {
                out[lo..hi].sort_unstable();
                lo = hi;
            }
            (io, out)
        }
    };
    check_sorted_permutation(&input, &output).map_err(|violation| TrialError::Oracle {
        algo: format!("{scope:?}"),
        dist: InputDistribution::Permutation,
        size: n,
        seed,
        violation,
    })?;

    let io_total = io.total();
    let blocks = n as f64 / config.block() as f64;
    let ratio = match scope {
        IoScope::TransposeOnly => io_total as f64 / (1.0 + blocks),
        IoScope::FullSort | IoScope::MergeBaseline => {
            let frames = config.frames() as f64;
            let levels = if frames > 1.0 {
                ((n as f64).ln() / frames.ln()).max(1.0)
            } else {
                1.0
            };
            io_total as f64 / (blocks * levels)
        }
    };
    Ok(IoRecord {
        size: n,
        block: config.block(),
        cache: config.cache(),
        io_total,
        ratio,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norm_at_two_is_half_time() {
        assert_eq!(normalized_time(1234.0, 2), 617.0);
    }

    #[test]
    fn time_trial_checks_output() {
        let params = SortParams::default();
        let rec = run_time_trial(
            Algorithm::SquareSort,
            InputDistribution::Permutation,
            10_000,
            1,
            &params,
            3,
        )
        .unwrap();
        assert_eq!(rec.size, 10_000);
        assert!(rec.time_ns > 0.0);
        assert!((rec.norm - rec.time_ns / (10_000.0 * 10_000f64.log2())).abs() <= 1e-12 * rec.norm);
    }

    #[test]
    fn time_trial_rejects_degenerate_arguments() {
        let p = SortParams::default();
        assert!(matches!(
            run_time_trial(Algorithm::HostSort, InputDistribution::Binary, 1, 0, &p, 1),
            Err(TrialError::TooSmall(1))
        ));
        assert!(matches!(
            run_time_trial(Algorithm::HostSort, InputDistribution::Binary, 10, 0, &p, 0),
            Err(TrialError::NoRepeats)
        ));
    }

    #[test]
    fn bench_pools_seeds() {
        let p = SortParams::default();
        let rec = run_bench(Algorithm::MergeSort, InputDistribution::Binary, 1000, &[1, 2], &p, 2).unwrap();
        assert!(rec.time_ns > 0.0 && rec.median_ns > 0.0);
    }

    #[test]
    fn io_trial_lower_bound() {
        let config = CacheConfig::new(4096, 64).unwrap();
        let rec = run_io_trial(1 << 14, config, 3, &SortParams::default(), IoScope::FullSort, false).unwrap();
        assert!(rec.io_total >= 2 * (1 << 14) / 64);
        assert!(rec.ratio > 0.0);
    }

    #[test]
    fn io_trial_in_cache_is_linear() {
        // everything fits: only cold loads of src, dst and the aux arrays
        let config = CacheConfig::new(1 << 20, 64).unwrap();
        let n = 1 << 14;
        let rec = run_io_trial(n, config, 3, &SortParams::default(), IoScope::FullSort, false).unwrap();
        let blocks = (n / 64) as u64;
        assert!(rec.io_total <= 5 * (1 + blocks), "io = {}", rec.io_total);
    }

    #[test]
    fn io_trial_rejects_short_cache() {
        let config = CacheConfig::new(512, 64).unwrap();
        let p = SortParams::default();
        assert!(matches!(
            run_io_trial(1000, config, 0, &p, IoScope::FullSort, false),
            Err(TrialError::NotTallCache { cache: 512, block: 64 })
        ));
        assert!(run_io_trial(1000, config, 0, &p, IoScope::FullSort, true).is_ok());
    }

    #[test]
    fn io_trial_is_deterministic() {
        let config = CacheConfig::new(256, 16).unwrap();
        let p = SortParams::default();
        for scope in [IoScope::FullSort, IoScope::TransposeOnly, IoScope::MergeBaseline] {
            let a = run_io_trial(5000, config, 7, &p, scope, false).unwrap();
            let b = run_io_trial(5000, config, 7, &p, scope, false).unwrap();
            assert_eq!(a, b);
        }
    }
}
