use std::fmt;

use crate::rng::Rng;

/// The four input families used in the timing experiments.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, clap::ValueEnum)]
pub enum InputDistribution {
    /// Uniform random permutation of `1..=n`.
    Permutation,
    /// I.i.d. values in `{0, 1}`.
    Binary,
    /// I.i.d. uniform values in `1..=n`.
    UniformFull,
    /// I.i.d. uniform values in `1..=floor(sqrt(n))`.
    UniformSqrt,
}

impl InputDistribution {
    pub const ALL: [InputDistribution; 4] = [
        InputDistribution::Permutation,
        InputDistribution::Binary,
        InputDistribution::UniformFull,
        InputDistribution::UniformSqrt,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            InputDistribution::Permutation => "permutation",
            InputDistribution::Binary => "binary",
            InputDistribution::UniformFull => "uniform-full",
            InputDistribution::UniformSqrt => "uniform-sqrt",
        }
    }
}

impl fmt::Display for InputDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Deterministic in `(dist, n, seed)`.
pub fn generate_input(dist: InputDistribution, n: usize, seed: u64) -> Vec<u64> {
    let mut rng = Rng::seed_from_u64(seed);
    let n64 = n as u64;
    match dist {
        InputDistribution::Permutation => {
            let mut v: Vec<u64> = (1..=n64).collect();
            rng.shuffle(&mut v);
            v
        }
        InputDistribution::Binary => (0..n).map(|_| rng.next_u64() & 1).collect(),
        InputDistribution::UniformFull => (0..n).map(|_| rng.range_inclusive(1, n64.max(1))).collect(),
        InputDistribution::UniformSqrt => {
            let hi = (n64.isqrt()).max(1);
            (0..n).map(|_| rng.range_inclusive(1, hi)).collect()
        }
    }
}
