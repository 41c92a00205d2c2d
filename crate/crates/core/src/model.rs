//! Probability arithmetic used by the interval constructions.
//!
//! The constructions only ever add point masses, compare them, and test a
//! total against `1 - alpha` or a tail against `alpha / 2`. Abstracting those
//! operations lets the same code run in double precision
//! ([`Hypergeometric`]) or in exact rational arithmetic
//! ([`crate::oracle::Oracle`]).

use crate::hypergeom::{Hypergeometric, Params, Support};

pub trait MassModel: Sync {
    type Mass: Clone + Send;

    fn params(&self) -> &Params;

    /// `P_M(x)`, zero outside the support. `m` must be in `[0, N]`.
    fn mass(&self, m: usize, x: usize) -> Self::Mass;

    fn zero(&self) -> Self::Mass;

    fn add(&self, a: &Self::Mass, b: &Self::Mass) -> Self::Mass;

    /// `P_M([a, b])`.
    fn interval_mass(&self, m: usize, a: usize, b: usize) -> Self::Mass;

    /// `a > b`, with values equal to working precision counted as tied.
    fn exceeds(&self, a: &Self::Mass, b: &Self::Mass) -> bool;

    /// `mass >= 1 - alpha`.
    fn meets_level(&self, mass: &Self::Mass) -> bool;

    /// `tail <= alpha / 2`.
    fn within_half_alpha(&self, tail: &Self::Mass) -> bool;

    fn to_f64(&self, mass: &Self::Mass) -> f64;

    fn support(&self, m: usize) -> Support {
        self.params().support(m).expect("mass model queried outside [0, N]")
    }
}

/// Slack on the double-precision threshold comparisons. Probabilities that
/// equal `1 - alpha` or `alpha / 2` exactly (common with round `alpha` and
/// small `N`) come out of log-space evaluation a few ulps either side, and
/// summing the same interval in a different order moves them again. Exact
/// ties must count as meeting the threshold for the float path to agree with
/// the exact one.
pub const TIE_TOLERANCE: f64 = 1e-13;

/// Relative slack when comparing two point masses. Log-space evaluation is
/// accurate to about 1e-13 relative, and equal masses at different `x` are
/// common (the pmf is symmetric at `M = N/2` and ties elsewhere too).
pub const RELATIVE_TIE_TOLERANCE: f64 = 1e-12;

impl MassModel for Hypergeometric {
    type Mass = f64;

    fn params(&self) -> &Params {
        Hypergeometric::params(self)
    }

    fn mass(&self, m: usize, x: usize) -> f64 {
        self.pmf_in(m, x, MassModel::support(self, m))
    }

    fn zero(&self) -> f64 {
        0.0
    }

    fn add(&self, a: &f64, b: &f64) -> f64 {
        a + b
    }

    fn interval_mass(&self, m: usize, a: usize, b: usize) -> f64 {
        self.interval_prob_in(m, a, b, MassModel::support(self, m))
    }

    fn exceeds(&self, a: &f64, b: &f64) -> bool {
        *a - *b > RELATIVE_TIE_TOLERANCE * a.max(*b)
    }

    fn meets_level(&self, mass: &f64) -> bool {
        *mass >= self.params().level() - TIE_TOLERANCE
    }

    fn within_half_alpha(&self, tail: &f64) -> bool {
        *tail <= self.params().alpha() / 2.0 + TIE_TOLERANCE
    }

    fn to_f64(&self, mass: &f64) -> f64 {
        *mass
    }
}
