//! Experiment driver: input generators, timed and IO-counted trials, the
//! IO-scaling and cutoff sweeps, and CSV emission.

mod csv;
mod inputs;
mod sweep;
mod trial;

pub use self::csv::{
    format_bench_csv, format_io_csv, read_bench_csv, read_io_csv, write_bench_csv, write_io_csv, BenchRow, CsvError,
};
pub use inputs::{generate_input, InputDistribution};
pub use sweep::{cutoff_sweep, io_scaling_sweep, CacheRule, CellFailure, CutoffError, CutoffRecord, IoSweep};
pub use trial::{
    normalized_time, run_bench, run_io_trial, run_time_trial, Algorithm, BenchRecord, IoRecord, IoScope, TrialError,
};
