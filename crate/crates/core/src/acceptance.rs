//! Minimum-size acceptance intervals.
//!
//! For each `M` in the lower half `[0, floor(N/2)]` an interval is grown
//! outward from the mode, always absorbing the heavier of the two adjacent
//! points, until it carries probability `1 - alpha`. The result has minimum
//! cardinality among level-alpha sets and maximum probability among sets of
//! that cardinality. The upper half follows by reflection `x -> n - x`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hypergeom::{Hypergeometric, Params};
use crate::model::MassModel;

/// Which step of the construction produced a family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Raw,
    Adjusted,
    Symmetrized,
}

/// Acceptance intervals `[a_M, b_M]` indexed by `M` from zero. Half
/// families cover `[0, floor(N/2)]`, full families `[0, N]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AcceptanceFamily {
    params: Params,
    stage: Stage,
    lower: Vec<usize>,
    upper: Vec<usize>,
}

impl AcceptanceFamily {
    /// Builds a family from endpoint arrays, checking shape only: equal
    /// lengths, at most `N + 1` entries and `a_M <= b_M <= n`.
    pub fn from_parts(params: Params, stage: Stage, lower: Vec<usize>, upper: Vec<usize>) -> Result<Self> {
        if lower.len() != upper.len() || lower.is_empty() || lower.len() > params.population() + 1 {
            return Err(Error::IncompleteFamily {
                expected: params.population(),
                got: lower.len().min(upper.len()),
            });
        }
        for (&a, &b) in lower.iter().zip(&upper) {
            if a > b || b > params.sample() {
                return Err(Error::OutOfRange {
                    what: "acceptance endpoint",
                    value: if a > b { a } else { b },
                    max: if a > b { b } else { params.sample() },
                });
            }
        }
        Ok(Self {
            params,
            stage,
            lower,
            upper,
        })
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn stage(&self) -> Stage {
        self.stage
    }

    /// Number of `M` values covered.
    pub fn len(&self) -> usize {
        self.lower.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lower.is_empty()
    }

    /// True when every `M` in `[0, N]` has an interval.
    pub fn is_full(&self) -> bool {
        self.lower.len() == self.params.population() + 1
    }

    pub fn interval(&self, m: usize) -> (usize, usize) {
        (self.lower[m], self.upper[m])
    }

    pub fn lower(&self) -> &[usize] {
        &self.lower
    }

    pub fn upper(&self) -> &[usize] {
        &self.upper
    }

    pub fn cardinality(&self, m: usize) -> usize {
        self.upper[m] - self.lower[m] + 1
    }

    /// `sum_M (b_M - a_M + 1)`.
    pub fn total_size(&self) -> usize {
        (0..self.len()).map(|m| self.cardinality(m)).sum()
    }

    pub fn is_monotone(&self) -> bool {
        self.lower.windows(2).all(|w| w[0] <= w[1]) && self.upper.windows(2).all(|w| w[0] <= w[1])
    }

    /// `[a_{N-M}, b_{N-M}] = [n - b_M, n - a_M]` for every `M`. Only
    /// meaningful on full families.
    pub fn is_symmetric(&self) -> bool {
        let n = self.params.sample();
        let big_n = self.params.population();
        self.is_full()
            && (0..=big_n)
                .all(|m| self.lower[big_n - m] + self.upper[m] == n && self.upper[big_n - m] + self.lower[m] == n)
    }

    /// Fails on the first `M` whose interval misses level alpha.
    pub fn check_level<Mm: MassModel>(&self, model: &Mm) -> Result<()> {
        for m in 0..self.len() {
            let (a, b) = self.interval(m);
            let mass = model.interval_mass(m, a, b);
            if !model.meets_level(&mass) {
                return Err(Error::LevelViolation {
                    m,
                    lower: a,
                    upper: b,
                    prob: model.to_f64(&mass),
                });
            }
        }
        Ok(())
    }

    /// Relabels the stage, e.g. before inverting a hand-built family.
    pub fn restaged(mut self, stage: Stage) -> Self {
        self.stage = stage;
        self
    }
}

/// Grows the minimum-size, maximum-probability acceptance interval for one
/// `M` outward from the mode. Ties between the two neighbours extend left.
pub fn amo_interval<Mm: MassModel>(model: &Mm, m: usize) -> (usize, usize) {
    let support = model.support(m);
    let start = model.params().mode(m).clamp(support.min, support.max);
    let (mut left, mut right) = (start, start);
    let mut total = model.mass(m, start);
    let mut next_left = (left > support.min).then(|| model.mass(m, left - 1));
    let mut next_right = (right < support.max).then(|| model.mass(m, right + 1));

    while !model.meets_level(&total) {
        let go_right = match (&next_left, &next_right) {
            (_, None) => false,
            (None, Some(_)) => true,
            (Some(pl), Some(pr)) => model.exceeds(pr, pl),
        };
        if go_right {
            let p = next_right.take().expect("right neighbour checked");
            total = model.add(&total, &p);
            right += 1;
            next_right = (right < support.max).then(|| model.mass(m, right + 1));
        } else if let Some(p) = next_left.take() {
            total = model.add(&total, &p);
            left -= 1;
            next_left = (left > support.min).then(|| model.mass(m, left - 1));
        } else {
            // Whole support absorbed; only reachable when rounding leaves the
            // total a hair under an alpha so small that 1 - alpha rounds to 1.
            break;
        }
    }
    (left, right)
}

/// Raw intervals for `M` in `[0, floor(N/2)]`, computed in parallel over `M`.
pub fn amo_half_with<Mm: MassModel>(model: &Mm) -> AcceptanceFamily {
    let params = *model.params();
    let (lower, upper): (Vec<usize>, Vec<usize>) = (0..=params.half())
        .into_par_iter()
        .map(|m| amo_interval(model, m))
        .unzip();
    AcceptanceFamily {
        params,
        stage: Stage::Raw,
        lower,
        upper,
    }
}

pub fn amo_half(kernel: &Hypergeometric) -> AcceptanceFamily {
    amo_half_with(kernel)
}

/// Extends a half family to `[0, N]` with `a_{N-M} = n - b_M` and
/// `b_{N-M} = n - a_M`. For even `N` the entry at `N/2` keeps its own
/// interval rather than its reflection.
pub fn reflect_full(half: &AcceptanceFamily) -> Result<AcceptanceFamily> {
    let params = *half.params();
    let (big_n, n) = (params.population(), params.sample());
    if half.len() != params.half() + 1 {
        return Err(Error::IncompleteFamily {
            expected: params.half(),
            got: half.len(),
        });
    }
    let mut lower = vec![0; big_n + 1];
    let mut upper = vec![0; big_n + 1];
    for m in 0..=params.half() {
        let (a, b) = half.interval(m);
        lower[m] = a;
        upper[m] = b;
        if big_n - m > params.half() {
            lower[big_n - m] = n - b;
            upper[big_n - m] = n - a;
        }
    }
    Ok(AcceptanceFamily {
        params,
        stage: half.stage(),
        lower,
        upper,
    })
}
