//! Baseline intervals by pivoting the c.d.f.:
//!
//! ```text
//! L(x) = min{M : P_M(X >= x) > alpha1}
//! U(x) = max{M : P_M(X <= x) > alpha2}
//! ```
//!
//! `P_M(X >= x)` is nondecreasing in `M` and `P_M(X <= x)` nonincreasing,
//! so both limits are found by bisection.

use crate::error::{Error, Result};
use crate::hypergeom::Hypergeometric;
use crate::invert::{ConfidenceTable, Method};
use crate::model::TIE_TOLERANCE;

/// How the limits are located. `Linear` scans every `M` and exists for
/// differential testing of the bisection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Search {
    #[default]
    Bisect,
    Linear,
}

const SPLIT_TOLERANCE: f64 = 1e-12;

pub fn pivot_ci(kernel: &Hypergeometric, x: usize, alpha1: f64, alpha2: f64) -> Result<(usize, usize)> {
    pivot_ci_with(kernel, x, alpha1, alpha2, Search::Bisect)
}

pub fn pivot_ci_with(
    kernel: &Hypergeometric,
    x: usize,
    alpha1: f64,
    alpha2: f64,
    search: Search,
) -> Result<(usize, usize)> {
    let params = kernel.params();
    let alpha = params.alpha();
    if alpha1 < 0.0 || alpha2 < 0.0 || (alpha1 + alpha2 - alpha).abs() > SPLIT_TOLERANCE {
        return Err(Error::AlphaSplit { alpha1, alpha2, alpha });
    }
    if x > params.sample() {
        return Err(Error::OutOfRange {
            what: "x",
            value: x,
            max: params.sample(),
        });
    }
    let big_n = params.population();
    let upper_ok = |m: usize| kernel.upper_tail(m, x).expect("M in range") > alpha1 + TIE_TOLERANCE;
    let lower_ok = |m: usize| kernel.cdf(m, x).expect("M in range") > alpha2 + TIE_TOLERANCE;

    let (lo, hi) = match search {
        Search::Bisect => {
            // P_N(X >= x) = 1 and P_0(X <= x) = 1, so both sets are nonempty.
            let lo = partition_point(0, big_n + 1, |m| !upper_ok(m));
            let hi = partition_point(0, big_n + 1, lower_ok) - 1;
            (lo, hi)
        }
        Search::Linear => {
            let lo = (0..=big_n).find(|&m| upper_ok(m)).expect("M = N qualifies");
            let hi = (0..=big_n).rev().find(|&m| lower_ok(m)).expect("M = 0 qualifies");
            (lo, hi)
        }
    };
    Ok((lo, hi))
}

/// First index in `[start, end)` where `pred` turns false; `pred` must be
/// true on a prefix and false after.
fn partition_point(start: usize, end: usize, pred: impl Fn(usize) -> bool) -> usize {
    let (mut lo, mut hi) = (start, end);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if pred(mid) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Equal-tailed (`alpha/2` each side) pivot intervals for every `x`.
pub fn pivot_table(kernel: &Hypergeometric) -> Result<ConfidenceTable> {
    pivot_table_with(kernel, Search::Bisect)
}

pub fn pivot_table_with(kernel: &Hypergeometric, search: Search) -> Result<ConfidenceTable> {
    let params = *kernel.params();
    let half = params.alpha() / 2.0;
    let rows = (0..=params.sample())
        .map(|x| pivot_ci_with(kernel, x, half, half, search))
        .collect::<Result<Vec<_>>>()?;
    let (lower, upper) = rows.into_iter().unzip();
    ConfidenceTable::from_parts(params, Method::Pivot, lower, upper)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergeom::Params;
    use crate::invert::cstar_table;

    fn kernel(population: usize, sample: usize, alpha: f64) -> Hypergeometric {
        Hypergeometric::new(Params::new(population, sample, alpha).unwrap())
    }

    #[test]
    fn published_pivot_row() {
        let k = kernel(500, 100, 0.05);
        assert_eq!(pivot_ci(&k, 13, 0.025, 0.025).unwrap(), (39, 101));
        let t = pivot_table(&k).unwrap();
        assert_eq!(t.interval(13), (39, 101));
        assert_eq!(t.method(), Method::Pivot);
        let diff = t.total_size() as i64 - 7129;
        assert!((200..=260).contains(&diff), "diff {diff}");
    }

    #[test]
    fn extremes() {
        let k = kernel(40, 9, 0.05);
        assert_eq!(pivot_ci(&k, 0, 0.025, 0.025).unwrap().0, 0);
        assert_eq!(pivot_ci(&k, 9, 0.025, 0.025).unwrap().1, 40);
    }

    #[test]
    fn bad_split_rejected() {
        let k = kernel(40, 9, 0.05);
        assert!(matches!(pivot_ci(&k, 3, 0.02, 0.02), Err(Error::AlphaSplit { .. })));
        assert!(pivot_ci(&k, 3, 0.05, 0.0).is_ok());
        assert!(pivot_ci(&k, 10, 0.025, 0.025).is_err());
    }

    #[test]
    fn tails_are_monotone_in_m() {
        for population in 1..=30 {
            for sample in 1..=population {
                let k = kernel(population, sample, 0.1);
                for x in 0..=sample {
                    for m in 0..population {
                        let up0 = k.upper_tail(m, x).unwrap();
                        let up1 = k.upper_tail(m + 1, x).unwrap();
                        assert!(up1 >= up0 - 1e-14);
                        let lo0 = k.cdf(m, x).unwrap();
                        let lo1 = k.cdf(m + 1, x).unwrap();
                        assert!(lo1 <= lo0 + 1e-14);
                    }
                }
            }
        }
    }

    #[test]
    fn bisection_matches_linear_scan() {
        for population in (1..=60).step_by(3) {
            for sample in (1..=population).step_by(2) {
                for alpha in [0.01, 0.05, 0.2, 0.6] {
                    let k = kernel(population, sample, alpha);
                    assert_eq!(
                        pivot_table_with(&k, Search::Bisect).unwrap(),
                        pivot_table_with(&k, Search::Linear).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn pivot_is_never_smaller_than_cstar() {
        for population in 1..=40 {
            for sample in 1..=population {
                let k = kernel(population, sample, 0.05);
                let piv = pivot_table(&k).unwrap();
                let cstar = cstar_table(&k).unwrap();
                assert!(piv.total_size() >= cstar.total_size());
            }
        }
    }
}
