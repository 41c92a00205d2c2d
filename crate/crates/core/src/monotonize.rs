//! Shifting acceptance intervals to monotone endpoints, and assembling the
//! symmetric family over `[0, N]`.
//!
//! Given max-optimal intervals over consecutive `M`, each interval whose
//! lower endpoint falls below the running maximum of earlier lower endpoints
//! is shifted up to meet it; each interval whose upper endpoint exceeds the
//! running minimum of later upper endpoints is shifted down to meet it. The
//! two sets of shifted indices are disjoint, lengths are kept, and every
//! shifted interval stays level alpha.

use crate::acceptance::{amo_half_with, AcceptanceFamily, Stage};
use crate::error::{Error, Result};
use crate::model::MassModel;

/// Bookkeeping of one [`adjust`] pass, indexed by `M`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdjustmentTrace {
    /// `max_{M' <= M} a_{M'}`
    pub running_max_lower: Vec<usize>,
    /// `min_{M' >= M} b_{M'}`
    pub running_min_upper: Vec<usize>,
    /// Indices shifted up (`a_M` below the running max).
    pub shifted_up: Vec<usize>,
    /// Indices shifted down (`b_M` above the running min).
    pub shifted_down: Vec<usize>,
    /// Shift magnitude per index; zero where unshifted.
    pub delta: Vec<usize>,
}

impl AdjustmentTrace {
    pub fn max_shift(&self) -> usize {
        self.delta.iter().copied().max().unwrap_or(0)
    }

    pub fn is_identity(&self) -> bool {
        self.shifted_up.is_empty() && self.shifted_down.is_empty()
    }
}

/// Shifts a raw family to nondecreasing endpoints.
///
/// Both running extrema are taken over the raw endpoints. Fails if an input
/// interval is not level alpha, or if some index would need both shifts
/// (impossible for max-optimal input).
pub fn adjust<Mm: MassModel>(family: &AcceptanceFamily, model: &Mm) -> Result<(AcceptanceFamily, AdjustmentTrace)> {
    family.check_level(model)?;
    let lower = family.lower();
    let upper = family.upper();
    let len = family.len();

    let running_max_lower: Vec<usize> = lower
        .iter()
        .scan(0usize, |acc, &a| {
            *acc = (*acc).max(a);
            Some(*acc)
        })
        .collect();
    let mut running_min_upper = upper.to_vec();
    for m in (0..len.saturating_sub(1)).rev() {
        running_min_upper[m] = running_min_upper[m].min(running_min_upper[m + 1]);
    }

    let mut new_lower = lower.to_vec();
    let mut new_upper = upper.to_vec();
    let mut delta = vec![0; len];
    let mut shifted_up = Vec::new();
    let mut shifted_down = Vec::new();
    for m in 0..len {
        let up = lower[m] < running_max_lower[m];
        let down = upper[m] > running_min_upper[m];
        match (up, down) {
            (true, true) => return Err(Error::ShiftConflict { m }),
            (true, false) => {
                let d = running_max_lower[m] - lower[m];
                new_lower[m] += d;
                new_upper[m] += d;
                delta[m] = d;
                shifted_up.push(m);
            }
            (false, true) => {
                let d = upper[m] - running_min_upper[m];
                new_lower[m] -= d;
                new_upper[m] -= d;
                delta[m] = d;
                shifted_down.push(m);
            }
            (false, false) => {}
        }
    }

    let adjusted = AcceptanceFamily::from_parts(*family.params(), Stage::Adjusted, new_lower, new_upper)?;
    let trace = AdjustmentTrace {
        running_max_lower,
        running_min_upper,
        shifted_up,
        shifted_down,
        delta,
    };
    Ok((adjusted, trace))
}

/// `h = max{x in [0, n] : P_{N/2}(X < x) <= alpha/2}` by scanning the lower
/// tail upward from zero.
pub fn center_cutoff<Mm: MassModel>(model: &Mm) -> Result<usize> {
    let params = model.params();
    let big_n = params.population();
    if !big_n.is_multiple_of(2) {
        return Err(Error::OddPopulation(big_n));
    }
    let m = big_n / 2;
    let mut h = 0;
    let mut tail = model.zero();
    while h < params.sample() {
        // tail currently holds P(X < h); extend to P(X < h + 1).
        let next = model.add(&tail, &model.mass(m, h));
        if !model.within_half_alpha(&next) {
            break;
        }
        tail = next;
        h += 1;
    }
    Ok(h)
}

/// Shortest symmetric level-alpha acceptance interval `[h, n - h]` at
/// `M = N/2`. `raw_center` is the max-optimal interval there; when it is
/// already symmetric the result equals it.
pub fn center_interval<Mm: MassModel>(model: &Mm, raw_center: (usize, usize)) -> Result<(usize, usize)> {
    let h = center_cutoff(model)?;
    let n = model.params().sample();
    if raw_center.0 + raw_center.1 == n {
        return Ok(raw_center);
    }
    Ok((h, n - h))
}

/// The three candidate formulas for the lower end of the center interval:
/// the tail scan, `min{a, n - b}` and `max{a, n - b}` of the raw center.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CenterForms {
    pub tail_scan: usize,
    pub min_form: usize,
    pub max_form: usize,
}

impl CenterForms {
    pub fn agree(&self) -> bool {
        self.tail_scan == self.min_form && self.min_form == self.max_form
    }
}

pub fn center_forms<Mm: MassModel>(model: &Mm, raw_center: (usize, usize)) -> Result<CenterForms> {
    let n = model.params().sample();
    let (a, b) = raw_center;
    Ok(CenterForms {
        tail_scan: center_cutoff(model)?,
        min_form: a.min(n - b),
        max_form: a.max(n - b),
    })
}

/// Assembles the full symmetric family from an adjusted half family: keep
/// `M < ceil(N/2)`, reflect `M > floor(N/2)`, and for even `N` use
/// [`center_interval`] at `N/2`.
pub fn symmetrize<Mm: MassModel>(adjusted_half: &AcceptanceFamily, model: &Mm) -> Result<AcceptanceFamily> {
    let params = *adjusted_half.params();
    let (big_n, n) = (params.population(), params.sample());
    if adjusted_half.len() != params.half() + 1 {
        return Err(Error::IncompleteFamily {
            expected: params.half(),
            got: adjusted_half.len(),
        });
    }
    let mut lower = vec![0; big_n + 1];
    let mut upper = vec![0; big_n + 1];
    for m in 0..=big_n {
        let (a, b) = if 2 * m < big_n {
            adjusted_half.interval(m)
        } else if 2 * m > big_n {
            let (a, b) = adjusted_half.interval(big_n - m);
            (n - b, n - a)
        } else {
            center_interval(model, adjusted_half.interval(m))?
        };
        lower[m] = a;
        upper[m] = b;
    }
    if let Some(m) = first_descent(&lower) {
        return Err(Error::NotMonotone { which: "lower", m });
    }
    if let Some(m) = first_descent(&upper) {
        return Err(Error::NotMonotone { which: "upper", m });
    }
    AcceptanceFamily::from_parts(params, Stage::Symmetrized, lower, upper)
}

fn first_descent(seq: &[usize]) -> Option<usize> {
    seq.windows(2).position(|w| w[1] < w[0]).map(|i| i + 1)
}

/// Every stage of the construction for one instance.
#[derive(Debug, Clone)]
pub struct Construction {
    pub raw: AcceptanceFamily,
    pub adjusted: AcceptanceFamily,
    pub trace: AdjustmentTrace,
    pub symmetrized: AcceptanceFamily,
}

/// Raw intervals, monotone shift, then symmetric assembly.
pub fn construct<Mm: MassModel>(model: &Mm) -> Result<Construction> {
    let raw = amo_half_with(model);
    let (adjusted, trace) = adjust(&raw, model)?;
    let symmetrized = symmetrize(&adjusted, model)?;
    Ok(Construction {
        raw,
        adjusted,
        trace,
        symmetrized,
    })
}

/// The symmetric, monotone acceptance family used for the optimal
/// confidence intervals.
pub fn optimal_family<Mm: MassModel>(model: &Mm) -> Result<AcceptanceFamily> {
    construct(model).map(|c| c.symmetrized)
}
