//! Grid sweeps that run the fast constructions against the exact oracle and
//! tally every checked property.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::acceptance::{amo_half, amo_half_with, AcceptanceFamily};
use crate::error::{Error, Result};
use crate::hypergeom::{Hypergeometric, Params};
use crate::invert::{cstar_table, invert};
use crate::model::MassModel;
use crate::monotonize::{center_forms, construct};
use crate::oracle::{Oracle, ORACLE_CAP};
use crate::pivot::pivot_table;

/// Which population sizes a sweep visits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Parity {
    #[default]
    All,
    Odd,
    Even,
}

impl Parity {
    fn admits(self, population: usize) -> bool {
        match self {
            Parity::All => true,
            Parity::Odd => population % 2 == 1,
            Parity::Even => population.is_multiple_of(2),
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::All => "all",
            Parity::Odd => "odd",
            Parity::Even => "even",
        })
    }
}

/// Instances `(N, n, alpha)` with `1 <= n <= N <= max_population`.
#[derive(Debug, Clone)]
pub struct Grid {
    pub max_population: usize,
    pub alphas: Vec<BigRational>,
    pub parity: Parity,
}

impl Default for Grid {
    fn default() -> Self {
        Self {
            max_population: 40,
            alphas: default_alphas(),
            parity: Parity::All,
        }
    }
}

pub fn default_alphas() -> Vec<BigRational> {
    [(1, 100), (1, 20), (1, 10), (1, 5), (3, 5)]
        .into_iter()
        .map(|(p, q)| BigRational::new(BigInt::from(p), BigInt::from(q)))
        .collect()
}

impl Grid {
    pub fn instances(&self) -> Vec<(usize, usize, BigRational)> {
        let mut out = Vec::new();
        for population in (1..=self.max_population).filter(|&p| self.parity.admits(p)) {
            for sample in 1..=population {
                for alpha in &self.alphas {
                    out.push((population, sample, alpha.clone()));
                }
            }
        }
        out
    }
}

/// Pass/fail counts for one named property.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckTally {
    pub name: &'static str,
    pub passed: u64,
    pub failed: u64,
    pub first_failure: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Report {
    pub title: String,
    pub instances: usize,
    pub checks: Vec<CheckTally>,
    /// Instances where `|C*|` exceeds the symmetric-set bound by one.
    pub gap_instances: Vec<String>,
    /// Largest shift applied by the monotone adjustment.
    pub max_shift: usize,
    /// Instances where `max{a, n - b}` of the raw center differs from the
    /// tail-scan cutoff.
    pub max_form_disagreements: Vec<String>,
    /// Whether the shift, center and gap metrics apply to this sweep.
    pub construction_metrics: bool,
}

impl Report {
    fn new(title: impl Into<String>) -> Self {
        Self {
            title: title.into(),
            ..Self::default()
        }
    }

    pub fn record(&mut self, name: &'static str, ok: bool, context: impl FnOnce() -> String) {
        let idx = match self.checks.iter().position(|c| c.name == name) {
            Some(i) => i,
            None => {
                self.checks.push(CheckTally {
                    name,
                    passed: 0,
                    failed: 0,
                    first_failure: None,
                });
                self.checks.len() - 1
            }
        };
        let tally = &mut self.checks[idx];
        if ok {
            tally.passed += 1;
        } else {
            tally.failed += 1;
            tally.first_failure.get_or_insert_with(context);
        }
    }

    pub fn check(&self, name: &str) -> Option<&CheckTally> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.failed == 0)
    }

    fn merge(&mut self, other: Report) {
        self.instances += other.instances;
        for c in other.checks {
            match self.checks.iter_mut().find(|t| t.name == c.name) {
                Some(t) => {
                    t.passed += c.passed;
                    t.failed += c.failed;
                    if t.first_failure.is_none() {
                        t.first_failure = c.first_failure;
                    }
                }
                None => self.checks.push(c),
            }
        }
        self.gap_instances.extend(other.gap_instances);
        self.max_form_disagreements.extend(other.max_form_disagreements);
        self.max_shift = self.max_shift.max(other.max_shift);
    }

    fn merged(title: String, parts: Vec<Report>) -> Self {
        let mut out = Report::new(title);
        for p in parts {
            out.merge(p);
        }
        out
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.title)?;
        writeln!(f, "instances: {}", self.instances)?;
        for c in &self.checks {
            let status = if c.failed == 0 { "PASS" } else { "FAIL" };
            writeln!(f, "  {status}  {:<66} {}/{}", c.name, c.passed, c.passed + c.failed)?;
            if let Some(first) = &c.first_failure {
                writeln!(f, "        first failure: {first}")?;
            }
        }
        if !self.construction_metrics {
            return write!(f, "result: {}", if self.all_passed() { "PASS" } else { "FAIL" });
        }
        writeln!(f, "max shift: {}", self.max_shift)?;
        writeln!(
            f,
            "center max-form disagreements: {}",
            self.max_form_disagreements.len()
        )?;
        for d in self.max_form_disagreements.iter().take(5) {
            writeln!(f, "  {d}")?;
        }
        writeln!(
            f,
            "gap instances (|C*| = bound + 1, n and N even): {}",
            self.gap_instances.len()
        )?;
        for g in self.gap_instances.iter().take(10) {
            writeln!(f, "  {g}")?;
        }
        if self.gap_instances.len() > 10 {
            writeln!(f, "  ... and {} more", self.gap_instances.len() - 10)?;
        }
        write!(f, "result: {}", if self.all_passed() { "PASS" } else { "FAIL" })
    }
}

/// Sweeps every instance of `grid`, in parallel, and merges the tallies in
/// grid order.
pub fn certify(grid: &Grid) -> Result<Report> {
    if grid.max_population > ORACLE_CAP {
        return Err(Error::Capacity {
            population: grid.max_population,
            cap: ORACLE_CAP,
        });
    }
    let alphas: Vec<String> = grid.alphas.iter().map(|a| a.to_string()).collect();
    let title = format!(
        "certification: 1 <= n <= N <= {}, N parity {}, alpha in {{{}}}",
        grid.max_population,
        grid.parity,
        alphas.join(", ")
    );
    let parts = grid
        .instances()
        .into_par_iter()
        .map(|(population, sample, alpha)| certify_instance(population, sample, &alpha))
        .collect::<Result<Vec<_>>>()?;
    let mut report = Report::merged(title, parts);
    report.construction_metrics = true;
    Ok(report)
}

/// All checks for one `(N, n, alpha)`.
pub fn certify_instance(population: usize, sample: usize, alpha: &BigRational) -> Result<Report> {
    let tag = format!("N={population} n={sample} alpha={alpha}");
    let at = |extra: String| format!("{tag} {extra}");
    let mut r = Report::new(tag.clone());
    r.instances = 1;
    r.construction_metrics = true;

    let oracle = Oracle::new(population, sample, alpha.clone())?;
    let alpha_f = alpha.to_f64().expect("alpha in (0, 1)");
    let kernel = Hypergeometric::new(Params::new(population, sample, alpha_f)?);
    let half = oracle.params().half();

    // float path against exact arithmetic
    let mut worst = 0.0f64;
    for m in 0..=population {
        for x in 0..=sample {
            let exact = oracle.to_f64(&oracle.numerator(m, x));
            let fast = kernel.pmf(m, x)?;
            let err = if exact == 0.0 {
                fast.abs()
            } else {
                ((fast - exact) / exact).abs()
            };
            worst = worst.max(err);
        }
    }
    r.record(
        "pmf agrees with exact value within 1e-10 relative",
        worst <= 1e-10,
        || at(format!("relative error {worst:e}")),
    );

    // raw intervals
    let raw = amo_half_with(&oracle);
    for m in 0..=half {
        let (a, b) = raw.interval(m);
        let best = oracle.min_level_interval(m)?;
        let mass = oracle.interval_mass(m, a, b);
        let exact = oracle.to_f64(&mass);
        let fast = kernel.interval_prob(m, a, b)?;
        r.record(
            "interval probability agrees with exact value within 1e-10 relative",
            ((fast - exact) / exact).abs() <= 1e-10,
            || at(format!("M={m} [{a}, {b}] {fast} vs {exact}")),
        );
        r.record(
            "raw interval has minimum cardinality (exhaustive search)",
            raw.cardinality(m) == best.cardinality,
            || at(format!("M={m} got [{a}, {b}], minimum {}", best.cardinality)),
        );
        r.record(
            "raw interval has maximum probability at that cardinality",
            &mass == best.prob.numer(),
            || at(format!("M={m} got [{a}, {b}], best {:?}", best.interval)),
        );
    }
    let float_raw = amo_half(&kernel);
    r.record(
        "double-precision raw family equals exact one",
        float_raw == raw_with_params(&raw, &kernel),
        || at(String::new()),
    );
    let mut coupled = true;
    for m in 0..=half {
        for m2 in m + 1..=half {
            let ((a, b), (a2, b2)) = (raw.interval(m), raw.interval(m2));
            if a2 < a && b2 < b {
                coupled = false;
            }
        }
    }
    r.record("endpoint coupling: a' < a implies b' >= b for M' > M", coupled, || {
        at(String::new())
    });

    // adjustment and symmetric assembly
    let built = construct(&oracle)?;
    let trace = &built.trace;
    r.max_shift = trace.max_shift();
    let disjoint = trace.shifted_up.iter().all(|m| !trace.shifted_down.contains(m));
    r.record("up-shifted and down-shifted index sets are disjoint", disjoint, || {
        at(String::new())
    });
    let lengths = (0..=half).all(|m| built.adjusted.cardinality(m) == built.raw.cardinality(m));
    r.record("adjusted lengths equal raw lengths", lengths, || at(String::new()));
    r.record("adjusted family is monotone", built.adjusted.is_monotone(), || {
        at(String::new())
    });
    let level = built.adjusted.check_level(&oracle);
    r.record("adjusted family is level alpha (exact)", level.is_ok(), || {
        at(format!("{level:?}"))
    });
    let full = &built.symmetrized;
    r.record("symmetric family endpoints nondecreasing", full.is_monotone(), || {
        at(String::new())
    });
    r.record("symmetric family is reflection symmetric", full.is_symmetric(), || {
        at(String::new())
    });
    let level = full.check_level(&oracle);
    r.record("symmetric family is level alpha (exact)", level.is_ok(), || {
        at(format!("{level:?}"))
    });

    if population.is_multiple_of(2) {
        let m = population / 2;
        let forms = center_forms(&oracle, built.adjusted.interval(m))?;
        r.record(
            "center cutoff by tail scan equals min form",
            forms.tail_scan == forms.min_form,
            || at(format!("{forms:?}")),
        );
        if forms.max_form != forms.tail_scan {
            r.max_form_disagreements.push(at(format!("{forms:?}")));
        }
        let (h, top) = full.interval(m);
        let narrower_fails =
            h + 1 > top.saturating_sub(1) || !oracle.meets_level(&oracle.interval_mass(m, h + 1, top - 1));
        r.record(
            "center interval is the shortest symmetric level interval",
            narrower_fails,
            || at(format!("[{h}, {top}]")),
        );
    }

    // inversion
    let table = match invert(full) {
        Ok(t) => t,
        Err(e) => {
            r.record("C* is interval valued and symmetric", false, || at(e.to_string()));
            return Ok(r);
        }
    };
    r.record("C* is interval valued and symmetric", true, String::new);
    let mut count = 0usize;
    let mut dual = true;
    for m in 0..=population {
        let (a, b) = full.interval(m);
        for x in 0..=sample {
            let inside = a <= x && x <= b;
            dual &= inside == table.contains(x, m);
            count += usize::from(inside);
        }
    }
    r.record("x in A*(M) iff M in C*(x)", dual, || at(String::new()));
    r.record(
        "|C*| equals |A*| by double counting",
        count == table.total_size() && count == full.total_size(),
        || at(format!("{count} vs {}", table.total_size())),
    );
    let fast = cstar_table(&kernel)?;
    r.record(
        "double-precision C* equals exact C*",
        fast.lower() == table.lower() && fast.upper() == table.upper(),
        || at(String::new()),
    );

    // exactness
    let pivot = pivot_table(&kernel)?;
    let (mut cstar_ok, mut pivot_ok) = (true, true);
    for m in 0..=population {
        cstar_ok &= oracle.is_level(&oracle.coverage(&table, m)?);
        pivot_ok &= oracle.is_level(&oracle.coverage(&pivot, m)?);
    }
    r.record("C* coverage >= 1 - alpha at every M (exact)", cstar_ok, || {
        at(String::new())
    });
    r.record("pivot coverage >= 1 - alpha at every M (exact)", pivot_ok, || {
        at(String::new())
    });
    r.record(
        "pivot total size >= C* total size",
        pivot.total_size() >= table.total_size(),
        || at(String::new()),
    );

    // size optimality
    let size = table.total_size();
    let bound = oracle.min_symmetric_total()?;
    let either_odd = population % 2 == 1 || sample % 2 == 1;
    r.record(
        "|C*| <= symmetric-set bound + 1",
        size <= bound + 1 && size >= bound,
        || at(format!("|C*|={size} bound={bound}")),
    );
    if either_odd {
        r.record("|C*| equals the bound when n or N is odd", size == bound, || {
            at(format!("|C*|={size} bound={bound}"))
        });
    }
    if size == bound + 1 {
        r.gap_instances.push(tag.clone());
    }
    let interval_min = oracle.min_symmetric_interval_total()?;
    r.record(
        "|C*| equals the minimum over nonempty symmetric intervals",
        size == interval_min,
        || at(format!("|C*|={size} minimum={interval_min}")),
    );
    if !either_odd {
        let m = population / 2;
        let c = oracle.binomial(m, sample / 2);
        let threshold = BigRational::new(BigInt::from(&c * &c), BigInt::from(oracle.binomial(population, sample)));
        if *alpha < threshold {
            r.record(
                "small-alpha sufficient condition gives |C*| = bound",
                size == bound,
                || at(format!("|C*|={size} bound={bound}")),
            );
        }
    }
    if population.is_multiple_of(2) && sample <= 14 {
        let greedy = oracle.min_symmetric_center_set()?;
        let brute = oracle.min_symmetric_center_set_bruteforce()?;
        r.record(
            "greedy symmetric center set equals subset enumeration",
            greedy == brute,
            || at(format!("greedy {greedy} brute {brute}")),
        );
    }
    if population == 20 && sample == 6 && *alpha == BigRational::new(3.into(), 5.into()) {
        r.record(
            "N=20 n=6 alpha=3/5 has the +1 gap with A*(10) = [2, 4]",
            size == bound + 1 && full.interval(10) == (2, 4),
            || at(format!("|C*|={size} bound={bound} A*(10)={:?}", full.interval(10))),
        );
    }
    Ok(r)
}

fn raw_with_params(raw: &AcceptanceFamily, kernel: &Hypergeometric) -> AcceptanceFamily {
    AcceptanceFamily::from_parts(
        *kernel.params(),
        raw.stage(),
        raw.lower().to_vec(),
        raw.upper().to_vec(),
    )
    .expect("same shape")
}

/// Exhaustive checks of the distributional lemmas for every
/// `1 <= n <= N <= max_population`, in exact arithmetic.
pub fn lemma_suite(max_population: usize) -> Result<Report> {
    if max_population > ORACLE_CAP {
        return Err(Error::Capacity {
            population: max_population,
            cap: ORACLE_CAP,
        });
    }
    let title = format!("distribution lemmas: 1 <= n <= N <= {max_population}, exact arithmetic");
    let pairs: Vec<(usize, usize)> = (1..=max_population)
        .flat_map(|p| (1..=p).map(move |s| (p, s)))
        .collect();
    let parts = pairs
        .into_par_iter()
        .map(|(population, sample)| lemma_instance(population, sample))
        .collect::<Result<Vec<_>>>()?;
    Ok(Report::merged(title, parts))
}

fn lemma_instance(population: usize, sample: usize) -> Result<Report> {
    let tag = format!("N={population} n={sample}");
    let at = |extra: String| format!("{tag} {extra}");
    let mut r = Report::new(tag.clone());
    r.instances = 1;
    let o = Oracle::new(population, sample, BigRational::new(1.into(), 20.into()))?;
    let (big_n, n) = (population, sample);
    let p = |m: usize, x: usize| o.numerator(m, x);
    let interval = |m: usize, a: usize, b: usize| o.interval_mass(m, a, b);

    // reflection symmetry
    let sym = (0..=big_n).all(|m| (0..=n).all(|x| p(m, x) == p(big_n - m, n - x)));
    r.record("pmf(M, x) = pmf(N - M, n - x)", sym, || at(String::new()));

    // monotone likelihood ratio, with c/0 = infinity
    let mut mlr = true;
    for m1 in 0..=big_n {
        for m2 in m1 + 1..=big_n {
            for x in 0..=n {
                for y in x + 1..=n {
                    let (p1x, p2x, p1y, p2y) = (p(m1, x), p(m2, x), p(m1, y), p(m2, y));
                    if (p1x.is_zero() && p2x.is_zero()) || (p1y.is_zero() && p2y.is_zero()) {
                        continue;
                    }
                    mlr &= &p2x * &p1y <= &p2y * &p1x;
                }
            }
        }
    }
    r.record("likelihood ratio pmf_M2 / pmf_M1 nondecreasing in x", mlr, || {
        at(String::new())
    });

    // unimodality in x around m = (n + 1)(M + 1)/(N + 2)
    let mut unimodal = true;
    let mut mode_ok = true;
    for m in 0..=big_n {
        let s = o.params().support(m)?;
        let num = (n + 1) * (m + 1);
        let den = big_n + 2;
        // ceil(m - 1) and floor(m)
        let m1 = (num.div_ceil(den)).saturating_sub(1).clamp(s.min, s.max);
        let m2 = (num / den).clamp(s.min, s.max);
        for x in s.min..m1 {
            unimodal &= p(m, x) < p(m, x + 1);
        }
        for x in m2..s.max {
            unimodal &= p(m, x) > p(m, x + 1);
        }
        let peak = (s.min..=s.max).map(|x| p(m, x)).max().expect("nonempty support");
        mode_ok &= (m1..=m2).all(|x| p(m, x) == peak) && p(m, o.params().mode(m).clamp(s.min, s.max)) == peak;
    }
    r.record(
        "pmf strictly increases to the mode and strictly decreases after",
        unimodal,
        || at(String::new()),
    );
    r.record("the mode formula attains the maximum", mode_ok, || at(String::new()));

    // ratio monotonicity in M
    let mut ratio = true;
    for x1 in 0..=n {
        for x2 in x1 + 1..=n {
            if x2 - x1 >= big_n - n {
                continue;
            }
            let top = (big_n - n + x1).saturating_sub(1);
            for m in x2..=top {
                ratio &= p(m, x2) * p(m + 1, x1) < p(m + 1, x2) * p(m, x1);
            }
        }
    }
    r.record("pmf_M(x2) / pmf_M(x1) strictly increasing in M", ratio, || {
        at(String::new())
    });

    // identity relating the M-step of P_M([a, b]) to its boundary terms
    let mut identity = true;
    for a in 0..=n {
        for b in a..=n {
            for m in 0..big_n {
                let lhs =
                    BigInt::from(big_n - m) * (BigInt::from(interval(m + 1, a, b)) - BigInt::from(interval(m, a, b)));
                let left = if a == 0 { BigUint::zero() } else { p(m, a - 1) };
                let rhs = BigInt::from(BigUint::from(n - a + 1) * left) - BigInt::from(BigUint::from(n - b) * p(m, b));
                identity &= lhs == rhs;
            }
        }
    }
    r.record("(N - M)(P_{M+1}[a,b] - P_M[a,b]) boundary identity", identity, || {
        at(String::new())
    });

    // peak of M -> P_M([a, b]) and its behavior under shifts
    let mut peak_ok = true;
    let mut shift_peak = true;
    let mut shift_mass = true;
    let mut peaks = vec![vec![0usize; n + 1]; n + 1];
    for (a, row) in peaks.iter_mut().enumerate() {
        for (b, slot) in row.iter_mut().enumerate().skip(a) {
            if b - a >= n {
                continue;
            }
            let peak = o.unimodal_peak(a, b)?;
            *slot = peak;
            for m in 0..big_n {
                let (cur, next) = (interval(m, a, b), interval(m + 1, a, b));
                if m < peak {
                    peak_ok &= cur <= next;
                } else {
                    peak_ok &= cur >= next;
                }
            }
        }
    }
    for a in 0..=n {
        for b in a..=n {
            if b - a >= n {
                continue;
            }
            for d in 1..=n - b {
                let shifted = peaks[a + d][b + d];
                shift_peak &= peaks[a][b] <= shifted;
                for m in shifted..=big_n {
                    shift_mass &= interval(m, a, b) <= interval(m, a + d, b + d);
                }
            }
        }
    }
    r.record(
        "P_M([a, b]) rises up to its peak M(a, b) and falls after",
        peak_ok,
        || at(String::new()),
    );
    r.record("shifting [a, b] right never moves the peak left", shift_peak, || {
        at(String::new())
    });
    r.record(
        "past the shifted peak the shifted interval is heavier",
        shift_mass,
        || at(String::new()),
    );
    Ok(r)
}
