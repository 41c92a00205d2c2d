//! Hypergeometric kernels: support, log-space pmf, tails and interval masses.
//!
//! `X ~ Hyper(M, n, N)` counts the special items in a size-`n` sample drawn
//! without replacement from `N` items, `M` of which are special. All sums of
//! probabilities accumulate terms in ascending order of magnitude.

use crate::error::{Error, Result};

/// The fixed problem instance: population size `N`, sample size `n` and
/// error level `alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    population: usize,
    sample: usize,
    alpha: f64,
}

impl Params {
    pub fn new(population: usize, sample: usize, alpha: f64) -> Result<Self> {
        let valid = sample > 0 && sample <= population && alpha > 0.0 && alpha < 1.0;
        if !valid {
            return Err(Error::InvalidParams {
                population,
                sample,
                alpha,
            });
        }
        Ok(Self {
            population,
            sample,
            alpha,
        })
    }

    /// Population size `N`.
    #[inline]
    pub fn population(&self) -> usize {
        self.population
    }

    /// Sample size `n`.
    #[inline]
    pub fn sample(&self) -> usize {
        self.sample
    }

    #[inline]
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Required acceptance probability `1 - alpha`.
    #[inline]
    pub fn level(&self) -> f64 {
        1.0 - self.alpha
    }

    /// Largest index of the lower half `[0, floor(N/2)]`.
    #[inline]
    pub fn half(&self) -> usize {
        self.population / 2
    }

    pub(crate) fn check_m(&self, m: usize) -> Result<()> {
        if m > self.population {
            return Err(Error::OutOfRange {
                what: "M",
                value: m,
                max: self.population,
            });
        }
        Ok(())
    }

    /// Values of `x` with positive probability when `M = m`.
    pub fn support(&self, m: usize) -> Result<Support> {
        self.check_m(m)?;
        Ok(Support {
            min: (m + self.sample).saturating_sub(self.population),
            max: m.min(self.sample),
        })
    }

    /// `floor((n+1)(M+1)/(N+2))`, a maximizer of the pmf in `x`. When the
    /// ratio is an integer the value one below ties with it.
    pub fn mode(&self, m: usize) -> usize {
        let num = (self.sample as u128 + 1) * (m as u128 + 1);
        (num / (self.population as u128 + 2)) as usize
    }
}

/// Inclusive range `[min, max]` of `x` values with positive probability.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Support {
    pub min: usize,
    pub max: usize,
}

impl Support {
    pub fn len(&self) -> usize {
        self.max - self.min + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, x: usize) -> bool {
        self.min <= x && x <= self.max
    }

    /// Intersection with `[a, b]`, or `None` if they do not overlap.
    pub fn clip(&self, a: usize, b: usize) -> Option<(usize, usize)> {
        let lo = a.max(self.min);
        let hi = b.min(self.max);
        (lo <= hi).then_some((lo, hi))
    }
}

/// Natural-log probability; `-inf` encodes zero.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct LogProb(f64);

impl LogProb {
    pub const ZERO: LogProb = LogProb(f64::NEG_INFINITY);

    pub fn new(value: f64) -> Self {
        debug_assert!(!value.is_nan());
        LogProb(value.min(0.0))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn prob(self) -> f64 {
        self.0.exp()
    }

    pub fn is_zero(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }
}

/// Unevaluated sum `hi + lo` carrying about 106 bits; keeps log-factorials
/// of populations in the thousands accurate to well below one ulp of a pmf.
#[derive(Debug, Clone, Copy, Default)]
struct DoubleDouble {
    hi: f64,
    lo: f64,
}

impl DoubleDouble {
    fn two_sum(a: f64, b: f64) -> (f64, f64) {
        let s = a + b;
        let bb = s - a;
        (s, (a - (s - bb)) + (b - bb))
    }

    fn add(self, other: Self) -> Self {
        let (s, e) = Self::two_sum(self.hi, other.hi);
        let e = e + (self.lo + other.lo);
        let hi = s + e;
        DoubleDouble { hi, lo: e - (hi - s) }
    }

    fn neg(self) -> Self {
        DoubleDouble {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    fn sub(self, other: Self) -> Self {
        self.add(other.neg())
    }

    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

/// Hypergeometric kernel bound to one [`Params`], with its log-factorial
/// table of length `N + 1`. Immutable after construction.
#[derive(Debug, Clone)]
pub struct Hypergeometric {
    params: Params,
    log_fact: Vec<DoubleDouble>,
    log_norm: DoubleDouble,
}

impl Hypergeometric {
    pub fn new(params: Params) -> Self {
        let mut log_fact = Vec::with_capacity(params.population + 1);
        let mut acc = DoubleDouble::default();
        log_fact.push(acc);
        for k in 1..=params.population {
            acc = acc.add(DoubleDouble {
                hi: (k as f64).ln(),
                lo: 0.0,
            });
            log_fact.push(acc);
        }
        let mut kernel = Self {
            params,
            log_fact,
            log_norm: DoubleDouble::default(),
        };
        kernel.log_norm = kernel.log_binom(params.population, params.sample);
        kernel
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn support(&self, m: usize) -> Result<Support> {
        self.params.support(m)
    }

    pub fn mode(&self, m: usize) -> usize {
        self.params.mode(m)
    }

    fn log_binom(&self, a: usize, b: usize) -> DoubleDouble {
        self.log_fact[a].sub(self.log_fact[b].add(self.log_fact[a - b]))
    }

    /// `ln P_M(X = x)`; `x` outside the support gives [`LogProb::ZERO`].
    pub fn log_pmf(&self, m: usize, x: usize) -> Result<LogProb> {
        let support = self.params.support(m)?;
        Ok(self.log_pmf_in(m, x, support))
    }

    fn log_pmf_in(&self, m: usize, x: usize, support: Support) -> LogProb {
        if !support.contains(x) {
            return LogProb::ZERO;
        }
        let p = &self.params;
        let special = self.log_binom(m, x);
        let ordinary = self.log_binom(p.population - m, p.sample - x);
        LogProb::new(special.add(ordinary).sub(self.log_norm).to_f64())
    }

    pub fn pmf(&self, m: usize, x: usize) -> Result<f64> {
        Ok(self.log_pmf(m, x)?.prob())
    }

    /// pmf for an `m` already known to be in range.
    pub(crate) fn pmf_in(&self, m: usize, x: usize, support: Support) -> f64 {
        self.log_pmf_in(m, x, support).prob()
    }

    /// `P_M(a <= X <= b)`; zero when `a > b` or the interval misses the
    /// support. Terms are consumed from whichever end is smaller, which is
    /// ascending order because the pmf is unimodal.
    pub fn interval_prob(&self, m: usize, a: usize, b: usize) -> Result<f64> {
        let support = self.params.support(m)?;
        Ok(self.interval_prob_in(m, a, b, support))
    }

    pub(crate) fn interval_prob_in(&self, m: usize, a: usize, b: usize, support: Support) -> f64 {
        let Some((mut lo, mut hi)) = support.clip(a, b) else {
            return 0.0;
        };
        let mut p_lo = self.pmf_in(m, lo, support);
        let mut p_hi = self.pmf_in(m, hi, support);
        let mut total = 0.0;
        while lo < hi {
            if p_lo <= p_hi {
                total += p_lo;
                lo += 1;
                p_lo = self.pmf_in(m, lo, support);
            } else {
                total += p_hi;
                hi -= 1;
                p_hi = self.pmf_in(m, hi, support);
            }
        }
        total + p_lo
    }

    /// `P_M(X < x)`.
    pub fn lower_tail(&self, m: usize, x: usize) -> Result<f64> {
        let support = self.params.support(m)?;
        if x <= support.min {
            return Ok(0.0);
        }
        Ok(self.interval_prob_in(m, support.min, x - 1, support))
    }

    /// `P_M(X >= x)`.
    pub fn upper_tail(&self, m: usize, x: usize) -> Result<f64> {
        let support = self.params.support(m)?;
        Ok(self.interval_prob_in(m, x, support.max, support))
    }

    /// `P_M(X <= x)`.
    pub fn cdf(&self, m: usize, x: usize) -> Result<f64> {
        let support = self.params.support(m)?;
        Ok(self.interval_prob_in(m, support.min, x, support))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn kernel(population: usize, sample: usize) -> Hypergeometric {
        Hypergeometric::new(Params::new(population, sample, 0.05).unwrap())
    }

    #[test]
    fn params_rejects_bad_instances() {
        assert!(Params::new(10, 0, 0.05).is_err());
        assert!(Params::new(10, 11, 0.05).is_err());
        assert!(Params::new(10, 5, 0.0).is_err());
        assert!(Params::new(10, 5, 1.0).is_err());
        assert!(Params::new(10, 10, 0.5).is_ok());
    }

    #[test]
    fn support_examples() {
        let p = Params::new(20, 6, 0.6).unwrap();
        assert_eq!(p.support(10).unwrap(), Support { min: 0, max: 6 });
        assert_eq!(p.support(0).unwrap(), Support { min: 0, max: 0 });
        let p = Params::new(500, 100, 0.05).unwrap();
        assert_eq!(p.support(495).unwrap(), Support { min: 95, max: 100 });
        assert!(matches!(p.support(501), Err(Error::OutOfRange { value: 501, .. })));
    }

    #[test]
    fn mode_examples() {
        assert_eq!(Params::new(20, 6, 0.6).unwrap().mode(10), 3);
        assert_eq!(Params::new(20, 6, 0.6).unwrap().mode(0), 0);
        assert_eq!(Params::new(500, 100, 0.05).unwrap().mode(250), 50);
    }

    #[test]
    fn pmf_matches_published_value_at_center() {
        let k = kernel(20, 6);
        let p2 = k.pmf(10, 2).unwrap();
        let p4 = k.pmf(10, 4).unwrap();
        assert_eq!((p2 * 1000.0).round(), 244.0);
        assert!((p2 - p4).abs() < 1e-15);
        assert!(k.log_pmf(0, 1).unwrap().is_zero());
        assert!(k.log_pmf(21, 1).is_err());
    }

    #[test]
    fn pmf_matches_direct_product_formula() {
        // C(10,2) C(10,4) / C(20,6) = 45 * 210 / 38760
        let k = kernel(20, 6);
        let direct = 45.0 * 210.0 / 38760.0;
        assert!((k.pmf(10, 2).unwrap() - direct).abs() < 1e-15);
    }

    #[test]
    fn tails_at_the_edges() {
        let k = kernel(20, 6);
        assert_eq!(k.lower_tail(10, 0).unwrap(), 0.0);
        assert_eq!(k.lower_tail(16, 2).unwrap(), 0.0); // x_min = 2
        assert!((k.lower_tail(10, 7).unwrap() - 1.0).abs() < 1e-12);
        let direct = k.pmf(10, 0).unwrap() + k.pmf(10, 1).unwrap();
        assert!((k.lower_tail(10, 2).unwrap() - direct).abs() < 1e-15);
    }

    #[test]
    fn interval_prob_examples() {
        let k = kernel(20, 6);
        assert!(k.interval_prob(10, 2, 3).unwrap() >= 0.4);
        assert_eq!(k.interval_prob(10, 4, 3).unwrap(), 0.0);
        assert!((k.interval_prob(10, 0, 6).unwrap() - 1.0).abs() < 1e-12);
        assert!((k.interval_prob(3, 0, 100).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn normalization_at_large_population() {
        let k = kernel(2000, 700);
        for m in (0..=2000).step_by(37) {
            let s = k.support(m).unwrap();
            let total = k.interval_prob(m, s.min, s.max).unwrap();
            assert!((total - 1.0).abs() < 1e-12, "M={m}: {total}");
        }
    }

    #[test]
    fn n_equal_population_is_deterministic() {
        let k = kernel(12, 12);
        for m in 0..=12 {
            assert_eq!(k.support(m).unwrap(), Support { min: m, max: m });
            assert!((k.pmf(m, m).unwrap() - 1.0).abs() < 1e-15);
        }
    }

    proptest! {
        #[test]
        fn normalization(population in 1usize..=2000, frac in 0.0f64..1.0, mfrac in 0.0f64..=1.0) {
            let sample = 1 + ((population - 1) as f64 * frac) as usize;
            let m = (population as f64 * mfrac) as usize;
            let k = kernel(population, sample);
            let s = k.support(m).unwrap();
            let mut terms: Vec<f64> = (s.min..=s.max).map(|x| k.pmf(m, x).unwrap()).collect();
            terms.sort_by(f64::total_cmp);
            let total: f64 = terms.iter().sum();
            prop_assert!((total - 1.0).abs() < 1e-12, "total {}", total);
        }

        #[test]
        fn reflection_symmetry(population in 1usize..=600, frac in 0.0f64..1.0, mfrac in 0.0f64..=1.0) {
            let sample = 1 + ((population - 1) as f64 * frac) as usize;
            let m = (population as f64 * mfrac) as usize;
            let k = kernel(population, sample);
            for x in 0..=sample {
                let a = k.log_pmf(m, x).unwrap().value();
                let b = k.log_pmf(population - m, sample - x).unwrap().value();
                if a.is_finite() || b.is_finite() {
                    prop_assert!((a - b).abs() < 1e-13, "x={} {} vs {}", x, a, b);
                }
            }
        }
    }
}
