//! Confidence intervals by inverting acceptance intervals:
//! `C(x) = {M : x in [a_M, b_M]}`. Monotone endpoints make every `C(x)` an
//! interval `[L(x), U(x)]`, and the total size of the table equals the total
//! size of the family.

use std::fmt;

use rayon::prelude::*;

use crate::acceptance::AcceptanceFamily;
use crate::error::{Error, Result};
use crate::hypergeom::{Hypergeometric, Params};
use crate::model::MassModel;
use crate::monotonize::optimal_family;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Inversion of the symmetric, shifted minimum-size family.
    CStar,
    /// Equal-tailed pivoting of the c.d.f.
    Pivot,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::CStar => "cstar",
            Method::Pivot => "pivot",
        })
    }
}

/// Intervals `[L(x), U(x)]` for `x` in `[0, n]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfidenceTable {
    params: Params,
    method: Method,
    lower: Vec<usize>,
    upper: Vec<usize>,
    total_size: usize,
}

impl ConfidenceTable {
    /// Validates shape and all table invariants: one nonempty interval in
    /// `[0, N]` per `x`, nondecreasing endpoints, and `C(x) = N - C(n - x)`.
    pub fn from_parts(params: Params, method: Method, lower: Vec<usize>, upper: Vec<usize>) -> Result<Self> {
        let n = params.sample();
        if lower.len() != n + 1 || upper.len() != n + 1 {
            return Err(Error::Parse(format!(
                "expected {} rows, got {}",
                n + 1,
                lower.len().min(upper.len())
            )));
        }
        for x in 0..=n {
            if lower[x] > upper[x] {
                return Err(Error::EmptyConfidenceSet { x });
            }
            if upper[x] > params.population() {
                return Err(Error::OutOfRange {
                    what: "confidence limit",
                    value: upper[x],
                    max: params.population(),
                });
            }
        }
        if let Some(x) = lower.windows(2).position(|w| w[1] < w[0]) {
            return Err(Error::NotMonotone { which: "L", m: x + 1 });
        }
        if let Some(x) = upper.windows(2).position(|w| w[1] < w[0]) {
            return Err(Error::NotMonotone { which: "U", m: x + 1 });
        }
        let big_n = params.population();
        if let Some(x) = (0..=n).find(|&x| lower[x] + upper[n - x] != big_n) {
            return Err(Error::Parse(format!("table is not symmetric at x={x}")));
        }
        let total_size = lower.iter().zip(&upper).map(|(l, u)| u - l + 1).sum();
        Ok(Self {
            params,
            method,
            lower,
            upper,
            total_size,
        })
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn interval(&self, x: usize) -> (usize, usize) {
        (self.lower[x], self.upper[x])
    }

    pub fn lower(&self) -> &[usize] {
        &self.lower
    }

    pub fn upper(&self) -> &[usize] {
        &self.upper
    }

    /// `sum_x (U(x) - L(x) + 1)`.
    pub fn total_size(&self) -> usize {
        self.total_size
    }

    pub fn contains(&self, x: usize, m: usize) -> bool {
        self.lower[x] <= m && m <= self.upper[x]
    }

    /// The `x` values whose interval covers `m`, as an inclusive range.
    /// Found by binary search on the monotone endpoints.
    pub fn covering_range(&self, m: usize) -> Option<(usize, usize)> {
        let end = self.lower.partition_point(|&l| l <= m);
        let start = self.upper.partition_point(|&u| u < m);
        (start < end).then(|| (start, end - 1))
    }
}

/// Inverts a full family with nondecreasing endpoints in one merged sweep.
pub fn invert(family: &AcceptanceFamily) -> Result<ConfidenceTable> {
    let params = *family.params();
    let (big_n, n) = (params.population(), params.sample());
    if !family.is_full() {
        return Err(Error::IncompleteFamily {
            expected: big_n,
            got: family.len(),
        });
    }
    let (a, b) = (family.lower(), family.upper());
    if let Some(m) = a.windows(2).position(|w| w[1] < w[0]) {
        return Err(Error::NotMonotone {
            which: "lower",
            m: m + 1,
        });
    }
    if let Some(m) = b.windows(2).position(|w| w[1] < w[0]) {
        return Err(Error::NotMonotone {
            which: "upper",
            m: m + 1,
        });
    }

    let mut lower = Vec::with_capacity(n + 1);
    let mut upper = Vec::with_capacity(n + 1);
    // first M with b_M >= x, and number of M with a_M <= x
    let mut first_reaching = 0;
    let mut started = 0;
    for x in 0..=n {
        while first_reaching <= big_n && b[first_reaching] < x {
            first_reaching += 1;
        }
        while started <= big_n && a[started] <= x {
            started += 1;
        }
        if started == 0 || first_reaching > started - 1 {
            return Err(Error::EmptyConfidenceSet { x });
        }
        lower.push(first_reaching);
        upper.push(started - 1);
    }
    ConfidenceTable::from_parts(params, Method::CStar, lower, upper)
}

/// The optimal confidence table for `kernel`'s parameters.
pub fn cstar_table(kernel: &Hypergeometric) -> Result<ConfidenceTable> {
    cstar_table_with(kernel)
}

pub fn cstar_table_with<Mm: MassModel>(model: &Mm) -> Result<ConfidenceTable> {
    invert(&optimal_family(model)?)
}

/// `P_M(M in C(X))`.
pub fn coverage(kernel: &Hypergeometric, table: &ConfidenceTable, m: usize) -> Result<f64> {
    if kernel.params() != table.params() {
        return Err(Error::ParamsMismatch);
    }
    kernel.params().check_m(m)?;
    match table.covering_range(m) {
        Some((lo, hi)) => kernel.interval_prob(m, lo, hi),
        None => Ok(0.0),
    }
}

/// Coverage for every `M` in `[0, N]`, in order.
pub fn coverage_curve(kernel: &Hypergeometric, table: &ConfidenceTable) -> Result<Vec<f64>> {
    (0..=table.params().population())
        .into_par_iter()
        .map(|m| coverage(kernel, table, m))
        .collect()
}

/// `|a| - |b|`.
pub fn total_size_diff(a: &ConfidenceTable, b: &ConfidenceTable) -> Result<i64> {
    if a.params() != b.params() {
        return Err(Error::ParamsMismatch);
    }
    Ok(a.total_size() as i64 - b.total_size() as i64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::acceptance::Stage;
    use crate::monotonize::optimal_family;

    fn kernel(population: usize, sample: usize, alpha: f64) -> Hypergeometric {
        Hypergeometric::new(Params::new(population, sample, alpha).unwrap())
    }

    #[test]
    fn published_rows() {
        let k = kernel(500, 100, 0.05);
        let t = cstar_table(&k).unwrap();
        assert_eq!(t.interval(0), (0, 14));
        assert_eq!(t.interval(13), (40, 102));
        assert_eq!(t.interval(50), (205, 295));
        assert_eq!(t.interval(100), (486, 500));
        assert_eq!(t.total_size(), 7129);
        assert_eq!(t.method(), Method::CStar);
    }

    #[test]
    fn extremes_always_covered() {
        for population in 1..=30 {
            for sample in 1..=population {
                let k = kernel(population, sample, 0.1);
                let t = cstar_table(&k).unwrap();
                assert!(t.contains(0, 0));
                assert!(t.contains(sample, population));
                assert_eq!(coverage(&k, &t, 0).unwrap(), 1.0);
            }
        }
    }

    #[test]
    fn total_size_matches_family_by_double_count() {
        for population in 1..=40 {
            for sample in 1..=population {
                for alpha in [0.01, 0.05, 0.1, 0.2, 0.6] {
                    let k = kernel(population, sample, alpha);
                    let fam = optimal_family(&k).unwrap();
                    let t = invert(&fam).unwrap();
                    let mut count = 0;
                    for m in 0..=population {
                        let (a, b) = fam.interval(m);
                        for x in a..=b {
                            assert!(t.contains(x, m));
                            count += 1;
                        }
                    }
                    assert_eq!(count, t.total_size());
                    assert_eq!(fam.total_size(), t.total_size());
                }
            }
        }
    }

    #[test]
    fn non_monotone_family_is_rejected() {
        let p = Params::new(2, 1, 0.5).unwrap();
        let fam = AcceptanceFamily::from_parts(p, Stage::Symmetrized, vec![0, 1, 0], vec![0, 1, 1]).unwrap();
        assert!(matches!(invert(&fam), Err(Error::NotMonotone { which: "lower", m: 2 })));
        let half = AcceptanceFamily::from_parts(p, Stage::Symmetrized, vec![0, 0], vec![0, 1]).unwrap();
        assert!(matches!(invert(&half), Err(Error::IncompleteFamily { .. })));
    }

    #[test]
    fn coverage_at_published_instance() {
        let k = kernel(500, 100, 0.05);
        let t = cstar_table(&k).unwrap();
        let curve = coverage_curve(&k, &t).unwrap();
        assert_eq!(curve.len(), 501);
        assert_eq!(curve[0], 1.0);
        for (m, c) in curve.iter().enumerate() {
            assert!(*c >= 0.95, "M={m}: {c}");
        }
    }

    #[test]
    fn coverage_matches_naive_sum() {
        let k = kernel(60, 17, 0.1);
        let t = cstar_table(&k).unwrap();
        for m in 0..=60 {
            let naive: f64 = (0..=17)
                .filter(|&x| t.contains(x, m))
                .map(|x| k.pmf(m, x).unwrap())
                .sum();
            assert!((coverage(&k, &t, m).unwrap() - naive).abs() < 1e-13);
        }
        assert!(coverage(&k, &t, 61).is_err());
    }

    #[test]
    fn size_difference() {
        let k = kernel(50, 10, 0.05);
        let t = cstar_table(&k).unwrap();
        assert_eq!(total_size_diff(&t, &t).unwrap(), 0);
        let other = cstar_table(&kernel(50, 10, 0.1)).unwrap();
        assert_eq!(total_size_diff(&t, &other), Err(Error::ParamsMismatch));
    }

    #[test]
    fn from_parts_checks_invariants() {
        let p = Params::new(4, 2, 0.2).unwrap();
        assert!(ConfidenceTable::from_parts(p, Method::CStar, vec![0, 1, 2], vec![2, 3, 4]).is_ok());
        // asymmetric
        assert!(ConfidenceTable::from_parts(p, Method::CStar, vec![0, 1, 2], vec![1, 3, 4]).is_err());
        // decreasing
        assert!(ConfidenceTable::from_parts(p, Method::CStar, vec![0, 2, 1], vec![3, 2, 4]).is_err());
        // empty row
        assert!(ConfidenceTable::from_parts(p, Method::CStar, vec![0, 3, 2], vec![2, 1, 4]).is_err());
    }
}
