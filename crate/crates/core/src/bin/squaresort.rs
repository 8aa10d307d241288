use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use squaresort::harness::{
    cutoff_sweep, format_bench_csv, format_io_csv, generate_input, io_scaling_sweep, run_bench, write_bench_csv,
    write_io_csv, Algorithm, BenchRecord, CacheRule, InputDistribution, IoScope,
};
use squaresort::sort::sort_native;
use squaresort::verify::{bucket_tail_stats, check_sorted_permutation, transpose_equivalence_test};
use squaresort::{Rng, SortParams};

#[derive(Parser)]
#[command(name = "squaresort", version, about = "Cache-oblivious SquareSort experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Time sorting algorithms on generated inputs.
    Bench(BenchArgs),
    /// Count block transfers on the simulated cache over a grid of sizes.
    Iosweep(IoSweepArgs),
    /// Time SquareSort under several cutoffs.
    CutoffSweep(CutoffArgs),
    /// Run the correctness and statistical checks.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct TuningArgs {
    /// Largest buffer sorted directly.
    #[arg(long)]
    cutoff: Option<usize>,
    /// Smallest side of a transposition subproblem that is still split.
    #[arg(long)]
    naive_threshold: Option<usize>,
}

impl TuningArgs {
    fn params(&self) -> Result<SortParams> {
        let mut p = SortParams::default();
        if let Some(c) = self.cutoff {
            p = p.with_cutoff(c)?;
        }
        if let Some(t) = self.naive_threshold {
            p = p.with_naive_threshold(t)?;
        }
        Ok(p)
    }
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_value = "squaresort")]
    algo: Vec<Algorithm>,
    #[arg(long, value_delimiter = ',', default_value = "permutation")]
    dist: Vec<InputDistribution>,
    /// Comma-separated sizes; accepts `1000`, `1e6`, `2^20` and ranges such as `1e3..1e7`.
    #[arg(long, default_value = "1e3..1e6")]
    sizes: SizeList,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    seeds: Vec<u64>,
    #[arg(long, default_value_t = 1)]
    repeats: usize,
    #[command(flatten)]
    tuning: TuningArgs,
    /// Directory receiving one `<algo>-<dist>.csv` per series; stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct IoSweepArgs {
    #[arg(long, default_value = "2^10..2^16")]
    sizes: SizeList,
    #[arg(long, value_delimiter = ',', default_value = "16,32,64")]
    blocks: Vec<usize>,
    /// `square` (M = B^2), `square*K` (M = K B^2) or `fixed:M`.
    #[arg(long, default_value = "square")]
    cache_rule: CacheRule,
    #[arg(long, value_enum, default_value = "full-sort")]
    scope: IoScope,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    seeds: Vec<u64>,
    /// Run caches with M < B^2 instead of rejecting them.
    #[arg(long)]
    allow_short_cache: bool,
    #[command(flatten)]
    tuning: TuningArgs,
    /// CSV file; stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CutoffArgs {
    #[arg(long, value_delimiter = ',', default_value = "100,256,493,958")]
    cutoffs: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "permutation")]
    dist: Vec<InputDistribution>,
    #[arg(long, default_value = "1e3..1e6")]
    sizes: SizeList,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    seeds: Vec<u64>,
    #[arg(long, default_value_t = 1)]
    repeats: usize,
    /// Directory receiving one `cutoff-<c>-<dist>.csv` per series; stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    All,
    /// Sorted-permutation oracle over all input families.
    Sort,
    /// Recursive against naive skew transposition.
    Transpose,
    /// Bucket-size tails, entropy and resampling rounds.
    Buckets,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value = "all")]
    suite: Suite,
    /// Trials per check; the bucket statistics use at least 1000.
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

/// Sizes given as a comma-separated list of values or ranges.
#[derive(Clone, Debug, PartialEq, Eq)]
struct SizeList(Vec<usize>);

fn parse_size(s: &str) -> Result<usize, String> {
    let s = s.trim();
    let pow = |base: &str, exp: &str| -> Result<usize, String> {
        let base: usize = base.parse().map_err(|_| format!("bad size {s:?}"))?;
        let exp: u32 = exp.parse().map_err(|_| format!("bad exponent in {s:?}"))?;
        base.checked_pow(exp).ok_or_else(|| format!("size {s:?} overflows"))
    };
    if let Some((b, e)) = s.split_once('^') {
        pow(b, e)
    } else if let Some((m, e)) = s.split_once(['e', 'E']) {
        Ok(m.parse::<usize>().map_err(|_| format!("bad size {s:?}"))? * pow("10", e)?)
    } else {
        s.parse().map_err(|_| format!("bad size {s:?}"))
    }
}

/// `a..b` steps geometrically by the base its endpoints are written in
/// (`1e3..1e6` by 10, `2^4..2^8` by 2), inclusive of both ends.
fn parse_range(lo: &str, hi: &str) -> Result<Vec<usize>, String> {
    let step = if lo.contains('^') {
        lo.split_once('^')
            .map(|(b, _)| b.trim())
            .unwrap_or("2")
            .parse()
            .map_err(|_| "bad base".to_string())?
    } else if lo.contains(['e', 'E']) {
        10
    } else {
        return Err(format!("range {lo}..{hi} needs 1eK or B^K endpoints"));
    };
    let (mut v, end) = (parse_size(lo)?, parse_size(hi)?);
    if step < 2 || v == 0 || v > end {
        return Err(format!("empty or invalid range {lo}..{hi}"));
    }
    let mut out = Vec::new();
    while v <= end {
        out.push(v);
        v = match v.checked_mul(step) {
            Some(x) => x,
            None => break,
        };
    }
    Ok(out)
}

impl FromStr for SizeList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut sizes = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            match part.split_once("..") {
                Some((lo, hi)) => sizes.extend(parse_range(lo, hi)?),
                None => sizes.push(parse_size(part)?),
            }
        }
        Ok(SizeList(sizes))
    }
}

fn write_series(dir: &Path, name: &str, records: &[BenchRecord]) -> Result<()> {
    let path = dir.join(format!("{name}.csv"));
    write_bench_csv(records, &path)?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn emit_series(out: Option<&Path>, name: &str, records: &[BenchRecord]) -> Result<()> {
    match out {
        Some(dir) => write_series(dir, name, records),
        None => {
            print!("# {name}\n{}", format_bench_csv(records));
            Ok(())
        }
    }
}

fn prepare_dir(out: Option<&Path>) -> Result<()> {
    if let Some(dir) = out {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    Ok(())
}

fn bench(args: BenchArgs) -> Result<bool> {
    let params = args.tuning.params()?;
    prepare_dir(args.out.as_deref())?;
    for &algo in &args.algo {
        for &dist in &args.dist {
            let mut records = Vec::with_capacity(args.sizes.0.len());
            for &n in &args.sizes.0 {
                let rec = run_bench(algo, dist, n, &args.seeds, &params, args.repeats)?;
                eprintln!(
                    "{algo} {dist} n={n} mean={:.0}ns median={:.0}ns norm={:.4}",
                    rec.time_ns, rec.median_ns, rec.norm
                );
                records.push(rec);
            }
            emit_series(args.out.as_deref(), &format!("{algo}-{dist}"), &records)?;
        }
    }
    Ok(true)
}

fn iosweep(args: IoSweepArgs) -> Result<bool> {
    let params = args.tuning.params()?;
    let sweep = io_scaling_sweep(
        &args.sizes.0,
        &args.blocks,
        args.cache_rule,
        &args.seeds,
        &params,
        args.scope,
        args.allow_short_cache,
    );
    match &args.out {
        Some(path) => write_io_csv(&sweep.records, path)?,
        None => print!("{}", format_io_csv(&sweep.records)),
    }
    for group in &sweep.summary {
        match group.fit {
            Ok(fit) => eprintln!(
                "B={} M={}: ratio min={:.4} max={:.4} mean={:.4} max/min={:.4}",
                group.block,
                group.cache,
                fit.min,
                fit.max,
                fit.mean,
                fit.spread()
            ),
            Err(e) => eprintln!("B={} M={}: {e}", group.block, group.cache),
        }
    }
    for f in &sweep.failures {
        eprintln!(
            "FAIL n={} B={} M={} seed={}: {}",
            f.size, f.block, f.cache, f.seed, f.reason
        );
    }
    Ok(sweep.is_clean())
}

fn cutoff(args: CutoffArgs) -> Result<bool> {
    prepare_dir(args.out.as_deref())?;
    for &dist in &args.dist {
        let records = cutoff_sweep(
            &args.cutoffs,
            dist,
            &args.sizes.0,
            &args.seeds,
            &SortParams::default(),
            args.repeats,
        )?;
        for &c in &args.cutoffs {
            let series: Vec<BenchRecord> = records
                .iter()
                .filter(|r| r.cutoff == c)
                .map(|r| r.record.clone())
                .collect();
            for r in &series {
                eprintln!("cutoff={c} {dist} n={} norm={:.4}", r.size, r.norm);
            }
            emit_series(args.out.as_deref(), &format!("cutoff-{c}-{dist}"), &series)?;
        }
    }
    Ok(true)
}

fn report(name: &str, pass: bool, detail: &str) -> bool {
    println!("{} {name} {detail}", if pass { "PASS" } else { "FAIL" });
    pass
}

fn verify_sort(trials: usize, seed: u64) -> bool {
    let params = SortParams::default();
    let mut ok = true;
    for dist in InputDistribution::ALL {
        let mut failures = 0;
        let mut rng = Rng::seed_from_u64(seed);
        for t in 0..trials {
            let n = 2 + rng.index(20_000);
            let input = generate_input(dist, n, seed.wrapping_add(t as u64));
            let out = sort_native(&input, &params, &mut Rng::for_stream(seed, t as u64));
            if let Err(v) = check_sorted_permutation(&input, &out) {
                failures += 1;
                eprintln!("  {dist} n={n} trial={t}: {v}");
            }
        }
        ok &= report(
            &format!("sort-{dist}"),
            failures == 0,
            &format!("{failures}/{trials} failures"),
        );
    }
    ok
}

fn verify_transpose(trials: usize, seed: u64) -> bool {
    let r = transpose_equivalence_test(trials.max(1), 4096, seed);
    for f in &r.failures {
        eprintln!("  trial {} (seed {}): {}", f.trial, f.seed, f.reason);
    }
    report(
        "transpose-equivalence",
        r.passed(),
        &format!(
            "{}/{} failures ({} single-bucket, {} all-in-first, {} degenerate)",
            r.failures.len(),
            r.trials,
            r.single_bucket,
            r.all_in_first,
            r.degenerate
        ),
    )
}

fn verify_buckets(trials: usize, seed: u64) -> Result<bool> {
    let r = bucket_tail_stats(10_000, trials.max(1000), seed)?;
    println!("n={} trials={} degenerate={}", r.n, r.trials, r.degenerate);
    let mut ok = true;
    for c in &r.upper {
        ok &= report(
            &format!("upper-tail-t{}", c.param),
            c.pass,
            &format!("freq={:.4} sigma={:.4} bound={:.4}", c.frequency, c.sigma, c.bound),
        );
    }
    for c in &r.lower {
        ok &= report(
            &format!("lower-tail-s{}", c.param),
            c.pass,
            &format!("freq={:.4} sigma={:.4} bound={:.4}", c.frequency, c.sigma, c.bound),
        );
    }
    ok &= report(
        "entropy",
        r.entropy_pass,
        &format!(
            "mean={:.1} sigma={:.1} bound={:.1}",
            r.entropy_mean, r.entropy_sigma, r.entropy_bound
        ),
    );
    ok &= report(
        "resampling-rounds",
        r.rounds_pass,
        &format!("mean={:.4} bound={:.4}", r.rounds_mean, r.rounds_bound),
    );
    ok &= report("partition", r.partition_pass && r.degenerate == 0, "");
    Ok(ok)
}

fn verify(args: VerifyArgs) -> Result<bool> {
    if args.trials == 0 {
        bail!("--trials must be positive");
    }
    let all = args.suite == Suite::All;
    let mut ok = true;
    if all || args.suite == Suite::Sort {
        ok &= verify_sort(args.trials, args.seed);
    }
    if all || args.suite == Suite::Transpose {
        ok &= verify_transpose(args.trials, args.seed);
    }
    if all || args.suite == Suite::Buckets {
        ok &= verify_buckets(args.trials, args.seed)?;
    }
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let outcome = match cli.command {
        Command::Bench(a) => bench(a),
        Command::Iosweep(a) => iosweep(a),
        Command::CutoffSweep(a) => cutoff(a),
        Command::Verify(a) => verify(a),
    };
    eprintln!("elapsed {:.1?}", start.elapsed());
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn size_notations() {
        assert_eq!(parse_size("1000"), Ok(1000));
        assert_eq!(parse_size("1e6"), Ok(1_000_000));
        assert_eq!(parse_size("5e2"), Ok(500));
        assert_eq!(parse_size("2^20"), Ok(1 << 20));
        assert!(parse_size("2^99").is_err());
        assert!(parse_size("ten").is_err());
    }

    #[test]
    fn size_lists_and_ranges() {
        let s: SizeList = "1e3..1e7".parse().unwrap();
        assert_eq!(s.0, vec![1000, 10_000, 100_000, 1_000_000, 10_000_000]);
        let s: SizeList = "2^10..2^13,7".parse().unwrap();
        assert_eq!(s.0, vec![1024, 2048, 4096, 8192, 7]);
        let s: SizeList = "".parse().unwrap();
        assert!(s.0.is_empty());
        assert!("100..1000".parse::<SizeList>().is_err());
        assert!("1e5..1e3".parse::<SizeList>().is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
