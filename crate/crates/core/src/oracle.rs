//! Exact brute-force references.
//!
//! Probabilities are kept as integer numerators over the common denominator
//! `C(N, n)`, so every comparison against `1 - alpha` or `alpha / 2` is
//! decided exactly. `alpha` enters as a rational supplied by the caller.
//! Searches here are exhaustive and deliberately share no code with the
//! fast constructions they certify.

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::hypergeom::Params;
use crate::invert::ConfidenceTable;
use crate::model::MassModel;

/// Largest population the oracle accepts.
pub const ORACLE_CAP: usize = 200;

/// Exact probability `numer / C(N, n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactProb {
    numer: BigUint,
    denom: BigUint,
}

impl ExactProb {
    pub fn numer(&self) -> &BigUint {
        &self.numer
    }

    pub fn denom(&self) -> &BigUint {
        &self.denom
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(BigInt::from(self.numer.clone()), BigInt::from(self.denom.clone()))
    }

    pub fn to_f64(&self) -> f64 {
        ratio_to_f64(&self.numer, &self.denom)
    }

    pub fn is_one(&self) -> bool {
        self.numer == self.denom
    }

    pub fn cmp_rational(&self, r: &BigRational) -> Ordering {
        self.to_rational().cmp(r)
    }
}

// Both sides stay far below f64::MAX for N <= 200, so each conversion is
// correctly rounded and the quotient is within a few ulps.
fn ratio_to_f64(numer: &BigUint, denom: &BigUint) -> f64 {
    numer.to_f64().unwrap_or(f64::NAN) / denom.to_f64().unwrap_or(f64::NAN)
}

/// Parses `"p/q"` or a plain decimal such as `"0.05"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::BadRational(s.to_string());
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(p, q));
    }
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    if (int.is_empty() && frac.is_empty()) || !frac.bytes().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{}{}", if int.is_empty() { "0" } else { int }, frac);
    let numer: BigInt = digits.parse().map_err(|_| bad())?;
    let denom = num_traits::pow(BigInt::from(10u32), frac.len());
    Ok(BigRational::new(numer, denom))
}

/// Result of the exhaustive minimum-interval search at one `M`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinInterval {
    pub cardinality: usize,
    /// A maximum-probability interval of that cardinality (the leftmost
    /// one when several tie).
    pub interval: (usize, usize),
    pub prob: ExactProb,
}

/// Exact hypergeometric arithmetic for one `(N, n, alpha)`.
#[derive(Debug, Clone)]
pub struct Oracle {
    params: Params,
    alpha: BigRational,
    alpha_num: BigUint,
    alpha_den: BigUint,
    /// Pascal triangle rows `0..=N`.
    binom: Vec<Vec<BigUint>>,
    denom: BigUint,
}

impl Oracle {
    pub fn new(population: usize, sample: usize, alpha: BigRational) -> Result<Self> {
        if population > ORACLE_CAP {
            return Err(Error::Capacity {
                population,
                cap: ORACLE_CAP,
            });
        }
        let alpha_f = alpha.to_f64().unwrap_or(f64::NAN);
        let invalid = || Error::InvalidParams {
            population,
            sample,
            alpha: alpha_f,
        };
        if !alpha.is_positive() || alpha >= BigRational::one() {
            return Err(invalid());
        }
        let params = Params::new(population, sample, alpha_f)?;
        let alpha_num = alpha.numer().to_biguint().ok_or_else(invalid)?;
        let alpha_den = alpha.denom().to_biguint().ok_or_else(invalid)?;

        let mut binom: Vec<Vec<BigUint>> = Vec::with_capacity(population + 1);
        for row in 0..=population {
            let mut cur = Vec::with_capacity(row + 1);
            for k in 0..=row {
                let v = if k == 0 || k == row {
                    BigUint::one()
                } else {
                    &binom[row - 1][k - 1] + &binom[row - 1][k]
                };
                cur.push(v);
            }
            binom.push(cur);
        }
        let denom = binom[population][sample].clone();
        Ok(Self {
            params,
            alpha,
            alpha_num,
            alpha_den,
            binom,
            denom,
        })
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn alpha(&self) -> &BigRational {
        &self.alpha
    }

    /// `C(a, b)`, zero when `b > a`.
    pub fn binomial(&self, a: usize, b: usize) -> BigUint {
        if b > a {
            BigUint::zero()
        } else {
            self.binom[a][b].clone()
        }
    }

    /// `C(M, x) C(N - M, n - x)`, the pmf numerator over `C(N, n)`.
    pub fn numerator(&self, m: usize, x: usize) -> BigUint {
        let (big_n, n) = (self.params.population(), self.params.sample());
        if m > big_n || x > n || x > m || n - x > big_n - m {
            return BigUint::zero();
        }
        &self.binom[m][x] * &self.binom[big_n - m][n - x]
    }

    fn prob(&self, numer: BigUint) -> ExactProb {
        ExactProb {
            numer,
            denom: self.denom.clone(),
        }
    }

    pub fn pmf(&self, m: usize, x: usize) -> Result<ExactProb> {
        self.params.check_m(m)?;
        Ok(self.prob(self.numerator(m, x)))
    }

    fn interval_numer(&self, m: usize, a: usize, b: usize) -> BigUint {
        let top = b.min(self.params.sample());
        (a..=top).fold(BigUint::zero(), |acc, x| acc + self.numerator(m, x))
    }

    /// Exact `P_M([a, b])`.
    pub fn interval_prob(&self, m: usize, a: usize, b: usize) -> Result<ExactProb> {
        self.params.check_m(m)?;
        Ok(self.prob(self.interval_numer(m, a, b)))
    }

    /// Exact `P_M(S)` for an arbitrary set of `x` values.
    pub fn set_prob(&self, m: usize, set: impl IntoIterator<Item = usize>) -> ExactProb {
        self.prob(
            set.into_iter()
                .fold(BigUint::zero(), |acc, x| acc + self.numerator(m, x)),
        )
    }

    /// `numer / C(N, n) >= 1 - alpha`.
    fn numer_meets_level(&self, numer: &BigUint) -> bool {
        numer * &self.alpha_den >= (&self.alpha_den - &self.alpha_num) * &self.denom
    }

    pub fn is_level(&self, p: &ExactProb) -> bool {
        self.numer_meets_level(&p.numer)
    }

    /// Smallest level-alpha interval at `M` by exhaustive search over all
    /// windows of the support, smallest cardinality first.
    pub fn min_level_interval(&self, m: usize) -> Result<MinInterval> {
        let support = self.params.support(m)?;
        let mut prefix = Vec::with_capacity(support.len() + 1);
        prefix.push(BigUint::zero());
        for x in support.min..=support.max {
            let next = prefix.last().expect("nonempty") + self.numerator(m, x);
            prefix.push(next);
        }
        for k in 1..=support.len() {
            let mut best: Option<(usize, BigUint)> = None;
            for start in 0..=support.len() - k {
                let mass = &prefix[start + k] - &prefix[start];
                if best.as_ref().is_none_or(|(_, b)| mass > *b) {
                    best = Some((start, mass));
                }
            }
            let (start, mass) = best.expect("at least one window");
            if self.numer_meets_level(&mass) {
                let a = support.min + start;
                return Ok(MinInterval {
                    cardinality: k,
                    interval: (a, a + k - 1),
                    prob: self.prob(mass),
                });
            }
        }
        unreachable!("the full support has probability one")
    }

    /// Smallest level-alpha set at `M = N/2` that is closed under
    /// `x -> n - x`, built greedily from symmetric pairs in decreasing mass
    /// (plus the singleton `{n/2}` for odd cardinalities when `n` is even).
    pub fn min_symmetric_center_set(&self) -> Result<usize> {
        let (big_n, n) = (self.params.population(), self.params.sample());
        if big_n % 2 != 0 {
            return Err(Error::OddPopulation(big_n));
        }
        let m = big_n / 2;
        let mut pairs: Vec<BigUint> = (0..n.div_ceil(2))
            .map(|x| self.numerator(m, x) + self.numerator(m, n - x))
            .collect();
        pairs.sort_by(|a, b| b.cmp(a));

        let mut best = usize::MAX;
        // even cardinalities: top k pairs
        let mut acc = BigUint::zero();
        for (k, p) in pairs.iter().enumerate() {
            acc += p;
            if self.numer_meets_level(&acc) {
                best = best.min(2 * (k + 1));
                break;
            }
        }
        if n % 2 == 0 {
            // odd cardinalities: the center point plus top k pairs
            let mut acc = self.numerator(m, n / 2);
            if self.numer_meets_level(&acc) {
                best = best.min(1);
            }
            for (k, p) in pairs.iter().enumerate() {
                acc += p;
                if self.numer_meets_level(&acc) {
                    best = best.min(2 * (k + 1) + 1);
                    break;
                }
            }
        }
        Ok(best)
    }

    /// Same quantity as [`Self::min_symmetric_center_set`] by enumerating every
    /// subset of `[0, n]`. Exponential; limited to `n <= 14`.
    pub fn min_symmetric_center_set_bruteforce(&self) -> Result<usize> {
        let (big_n, n) = (self.params.population(), self.params.sample());
        if big_n % 2 != 0 {
            return Err(Error::OddPopulation(big_n));
        }
        if n > 14 {
            return Err(Error::Capacity { population: n, cap: 14 });
        }
        let m = big_n / 2;
        let masses: Vec<BigUint> = (0..=n).map(|x| self.numerator(m, x)).collect();
        let mut best = usize::MAX;
        for mask in 1u32..(1 << (n + 1)) {
            let symmetric = (0..=n).all(|x| (mask >> x) & 1 == (mask >> (n - x)) & 1);
            let size = mask.count_ones() as usize;
            if !symmetric || size >= best {
                continue;
            }
            let mass = (0..=n)
                .filter(|x| (mask >> x) & 1 == 1)
                .fold(BigUint::zero(), |acc, x| acc + &masses[x]);
            if self.numer_meets_level(&mass) {
                best = size;
            }
        }
        Ok(best)
    }

    /// Smallest level-alpha symmetric interval `[c, n - c]` at `M = N/2`, by
    /// trying every `c`.
    pub fn min_symmetric_center_interval(&self) -> Result<(usize, usize)> {
        let (big_n, n) = (self.params.population(), self.params.sample());
        if big_n % 2 != 0 {
            return Err(Error::OddPopulation(big_n));
        }
        let m = big_n / 2;
        let c = (0..=n / 2)
            .rev()
            .find(|&c| self.numer_meets_level(&self.interval_numer(m, c, n - c)))
            .expect("[0, n] has probability one");
        Ok((c, n - c))
    }

    /// Sum over `M` of the minimum level-alpha cardinality, where for even
    /// `N` the `M = N/2` term is the minimum symmetric set instead. No
    /// symmetric confidence set can have smaller total size.
    pub fn min_symmetric_total(&self) -> Result<usize> {
        self.total_with_center(|o| o.min_symmetric_center_set())
    }

    /// As [`Self::min_symmetric_total`] but with the `M = N/2` term restricted to
    /// symmetric intervals: the minimum over symmetric confidence intervals
    /// with no empty `C(x)`.
    pub fn min_symmetric_interval_total(&self) -> Result<usize> {
        self.total_with_center(|o| o.min_symmetric_center_interval().map(|(c, d)| d - c + 1))
    }

    fn total_with_center(&self, center: impl Fn(&Self) -> Result<usize>) -> Result<usize> {
        let big_n = self.params.population();
        let mut total = 0;
        for m in 0..=big_n {
            if 2 * m == big_n {
                total += center(self)?;
            } else {
                total += self.min_level_interval(m)?.cardinality;
            }
        }
        Ok(total)
    }

    /// Peak `M(a, b)` of `M -> P_M([a, b])`: zero when `a = 0`, `N` when
    /// `b = n`, else the first `M` with
    /// `(n - a + 1) P_M(a - 1) < (n - b) P_M(b)`.
    pub fn unimodal_peak(&self, a: usize, b: usize) -> Result<usize> {
        let (big_n, n) = (self.params.population(), self.params.sample());
        if a > b || b > n {
            return Err(Error::OutOfRange {
                what: "interval endpoint",
                value: b.max(a),
                max: n,
            });
        }
        if b - a >= n {
            return Err(Error::FullRangeInterval { a, b });
        }
        if a == 0 {
            return Ok(0);
        }
        if b == n {
            return Ok(big_n);
        }
        let left = BigUint::from(n - a + 1);
        let right = BigUint::from(n - b);
        let peak = (0..=big_n)
            .find(|&m| &left * self.numerator(m, a - 1) < &right * self.numerator(m, b))
            .expect("the condition holds once M passes a - 1 + N - n");
        Ok(peak)
    }

    /// Exact coverage `P_M(M in C(X))`, summing over every `x` directly.
    pub fn coverage(&self, table: &ConfidenceTable, m: usize) -> Result<ExactProb> {
        self.params.check_m(m)?;
        let covered = (0..=self.params.sample()).filter(|&x| table.contains(x, m));
        Ok(self.set_prob(m, covered))
    }
}

impl MassModel for Oracle {
    type Mass = BigUint;

    fn params(&self) -> &Params {
        &self.params
    }

    fn mass(&self, m: usize, x: usize) -> BigUint {
        self.numerator(m, x)
    }

    fn zero(&self) -> BigUint {
        BigUint::zero()
    }

    fn add(&self, a: &BigUint, b: &BigUint) -> BigUint {
        a + b
    }

    fn interval_mass(&self, m: usize, a: usize, b: usize) -> BigUint {
        if a > b {
            return BigUint::zero();
        }
        self.interval_numer(m, a, b)
    }

    fn exceeds(&self, a: &BigUint, b: &BigUint) -> bool {
        a > b
    }

    fn meets_level(&self, mass: &BigUint) -> bool {
        self.numer_meets_level(mass)
    }

    fn within_half_alpha(&self, tail: &BigUint) -> bool {
        tail * &self.alpha_den * 2u32 <= &self.alpha_num * &self.denom
    }

    fn to_f64(&self, mass: &BigUint) -> f64 {
        ratio_to_f64(mass, &self.denom)
    }
}
