//! Cache-oblivious SquareSort.
//!
//! - [`sort`]: SquareSort, skew transposition and their helpers.
//! - [`memory`]: native arena and an LRU external-memory simulator.
//! - [`harness`]: input generators, timed and IO-counted trials, sweeps, CSV.
//! - [`verify`]: oracles and statistical checks.

pub mod harness;
pub mod memory;
pub mod rng;
pub mod sort;
pub mod verify;

pub use memory::{CacheConfig, IoCounter, Memory, NativeMemory, Region, SimMemory};
pub use rng::Rng;
pub use sort::{square_sort, SortParams};
