//! Instances shared by the benchmarks.

use hyperci::{Hypergeometric, Params};

/// `(N, n, alpha)` triples timed by every benchmark group.
pub const INSTANCES: [(usize, usize, f64); 3] = [(500, 100, 0.05), (365, 292, 0.10), (1000, 500, 0.05)];

pub fn kernel(population: usize, sample: usize, alpha: f64) -> Hypergeometric {
    Hypergeometric::new(Params::new(population, sample, alpha).expect("valid benchmark instance"))
}
