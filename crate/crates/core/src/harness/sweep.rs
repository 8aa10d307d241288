use std::str::FromStr;

use rayon::prelude::*;

use super::inputs::InputDistribution;
use super::trial::{run_bench, run_io_trial, Algorithm, BenchRecord, IoRecord, IoScope, TrialError};
use crate::memory::{CacheConfig, MemoryError};
use crate::sort::SortParams;
use crate::verify::{fit_io_constant, GroupFit};

/// How the cache size is derived from the block size in a sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CacheRule {
    /// `M = factor * B^2`.
    Square { factor: usize },
    /// The same `M` for every block size.
    Fixed(usize),
}

impl CacheRule {
    pub fn cache_for(&self, block: usize) -> usize {
        match *self {
            CacheRule::Square { factor } => factor * block * block,
            CacheRule::Fixed(cache) => cache,
        }
    }
}

impl FromStr for CacheRule {
    type Err = String;

    /// Accepts `square`, `square*K` and `fixed:M`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "square" {
            return Ok(CacheRule::Square { factor: 1 });
        }
        if let Some(k) = s.strip_prefix("square*") {
            let factor = k.parse().map_err(|_| format!("bad factor in cache rule {s:?}"))?;
            if factor == 0 {
                return Err("cache rule factor must be positive".into());
            }
            return Ok(CacheRule::Square { factor });
        }
        if let Some(m) = s.strip_prefix("fixed:") {
            return m
                .parse()
                .map(CacheRule::Fixed)
                .map_err(|_| format!("bad cache size in cache rule {s:?}"));
        }
        Err(format!(
            "unknown cache rule {s:?} (expected square, square*K or fixed:M)"
        ))
    }
}

/// A sweep cell that did not produce a record.
#[derive(Debug)]
pub struct CellFailure {
    pub size: usize,
    pub block: usize,
    pub cache: usize,
    pub seed: u64,
    pub reason: String,
}

#[derive(Debug)]
pub struct IoSweep {
    /// One record per successful (block, size, seed) cell, in that order.
    pub records: Vec<IoRecord>,
    pub failures: Vec<CellFailure>,
    pub summary: Vec<GroupFit>,
}

impl IoSweep {
    pub fn is_clean(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Runs [`run_io_trial`] over `blocks x sizes x seeds`.
///
/// Cells run in parallel, each on its own simulator; records come back in
/// grid order so output is reproducible. A failing cell is reported without
/// stopping the sweep.
pub fn io_scaling_sweep(
    sizes: &[usize],
    blocks: &[usize],
    rule: CacheRule,
    seeds: &[u64],
    params: &SortParams,
    scope: IoScope,
    allow_short_cache: bool,
) -> IoSweep {
    let cells: Vec<(usize, usize, u64)> = blocks
        .iter()
        .flat_map(|&b| sizes.iter().flat_map(move |&n| seeds.iter().map(move |&s| (b, n, s))))
        .collect();
    let outcomes: Vec<Result<IoRecord, CellFailure>> = cells
        .par_iter()
        .map(|&(block, size, seed)| {
            let cache = rule.cache_for(block);
            let fail = |reason: String| CellFailure {
                size,
                block,
                cache,
                seed,
                reason,
            };
            let config = CacheConfig::new(cache, block).map_err(|e: MemoryError| fail(e.to_string()))?;
            run_io_trial(size, config, seed, params, scope, allow_short_cache).map_err(|e| fail(e.to_string()))
        })
        .collect();

    let mut records = Vec::new();
    let mut failures = Vec::new();
    for outcome in outcomes {
        match outcome {
            Ok(r) => records.push(r),
            Err(f) => failures.push(f),
        }
    }
    let summary = fit_io_constant(&records);
    IoSweep {
        records,
        failures,
        summary,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CutoffRecord {
    pub cutoff: usize,
    pub record: BenchRecord,
}

/// Times SquareSort for every `(cutoff, size)` pair, pooling `seeds`.
pub fn cutoff_sweep(
    cutoffs: &[usize],
    dist: InputDistribution,
    sizes: &[usize],
    seeds: &[u64],
    params: &SortParams,
    repeats: usize,
) -> Result<Vec<CutoffRecord>, CutoffError> {
    let mut out = Vec::with_capacity(cutoffs.len() * sizes.len());
    for &cutoff in cutoffs {
        let p = params
            .with_cutoff(cutoff)
            .map_err(|e| CutoffError::Params(e.to_string()))?;
        for &n in sizes {
            let record = run_bench(Algorithm::SquareSort, dist, n, seeds, &p, repeats)?;
            out.push(CutoffRecord { cutoff, record });
        }
    }
    Ok(out)
}

#[derive(Debug, thiserror::Error)]
pub enum CutoffError {
    #[error("invalid cutoff: {0}")]
    Params(String),
    #[error(transparent)]
    Trial(#[from] TrialError),
}
