//! Release acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use hyperci::certify::{certify, default_alphas, lemma_suite, Grid, Report};
use hyperci::{coverage_curve, cstar_table, pivot_ci, pivot_table, Hypergeometric, Oracle, Params};
use num_traits::ToPrimitive;

/// Published limits for N = 500, n = 100, alpha = 0.05, x = 0..=100.
const PUBLISHED_L: [usize; 101] = [
    0, 1, 3, 5, 8, 12, 15, 16, 22, 25, 29, 32, 37, 40, 45, 47, 53, 56, 60, 65, 69, 73, 78, 82, 85, 90, 95, 100, 103,
    108, 113, 118, 122, 125, 130, 135, 140, 145, 149, 153, 158, 163, 168, 173, 178, 183, 187, 191, 195, 200, 205, 210,
    215, 220, 225, 230, 235, 240, 245, 250, 256, 261, 266, 271, 276, 281, 286, 291, 296, 301, 306, 312, 318, 323, 328,
    333, 338, 343, 348, 356, 361, 366, 371, 376, 383, 388, 393, 398, 406, 411, 416, 423, 428, 436, 441, 448, 454, 461,
    469, 476, 486,
];
const PUBLISHED_U: [usize; 101] = [
    14, 24, 31, 39, 46, 52, 59, 64, 72, 77, 84, 89, 94, 102, 107, 112, 117, 124, 129, 134, 139, 144, 152, 157, 162,
    167, 172, 177, 182, 188, 194, 199, 204, 209, 214, 219, 224, 229, 234, 239, 244, 250, 255, 260, 265, 270, 275, 280,
    285, 290, 295, 300, 305, 309, 313, 317, 322, 327, 332, 337, 342, 347, 351, 355, 360, 365, 370, 375, 378, 382, 387,
    392, 397, 400, 405, 410, 415, 418, 422, 427, 431, 435, 440, 444, 447, 453, 455, 460, 463, 468, 471, 475, 478, 484,
    485, 488, 492, 495, 497, 499, 500,
];
const PUBLISHED_TOTAL: usize = 7129;
/// Published total size of the best competing method on the same instance.
const COMPETITOR_TOTAL: usize = 7131;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn kernel(population: usize, sample: usize, alpha: f64) -> Hypergeometric {
    Hypergeometric::new(Params::new(population, sample, alpha).unwrap())
}

fn ms(d: Duration) -> String {
    format!("{:.1} ms", d.as_secs_f64() * 1e3)
}

fn published_table() -> Outcome {
    let start = Instant::now();
    let k = kernel(500, 100, 0.05);
    let table = cstar_table(&k).unwrap();
    let elapsed = start.elapsed();
    let matching = (0..=100)
        .filter(|&x| table.interval(x) == (PUBLISHED_L[x], PUBLISHED_U[x]))
        .count();
    outcome(
        matching == 101 && table.total_size() == PUBLISHED_TOTAL && elapsed < Duration::from_secs(1),
        format!(
            "{matching}/101 rows match, total {}, built in {}",
            table.total_size(),
            ms(elapsed)
        ),
    )
}

fn pivot_baseline() -> Outcome {
    let row = pivot_ci(&kernel(500, 100, 0.05), 13, 0.025, 0.025).unwrap();
    let diffs: Vec<i64> = (10..=490)
        .step_by(10)
        .map(|n| {
            let k = kernel(500, n, 0.05);
            pivot_table(&k).unwrap().total_size() as i64 - cstar_table(&k).unwrap().total_size() as i64
        })
        .collect();
    let (lo, hi) = (diffs.iter().min().unwrap(), diffs.iter().max().unwrap());
    outcome(
        row == (39, 101) && diffs.iter().all(|d| (200..=260).contains(d)),
        format!(
            "pivot C(13) = [{}, {}], size excess over n = 10..490 in [{lo}, {hi}]",
            row.0, row.1
        ),
    )
}

fn competitor() -> Outcome {
    let size = cstar_table(&kernel(500, 100, 0.05)).unwrap().total_size();
    outcome(
        size == PUBLISHED_TOTAL && size < COMPETITOR_TOTAL,
        format!("total {size} < {COMPETITOR_TOTAL}"),
    )
}

fn air_quality() -> Outcome {
    let cases = [
        (292, 16, (17, 24)),
        (166, 7, (10, 24)),
        (290, 11, (11, 17)),
        (332, 15, (15, 18)),
    ];
    let got: Vec<(usize, usize)> = cases
        .iter()
        .map(|&(n, x, _)| cstar_table(&kernel(365, n, 0.10)).unwrap().interval(x))
        .collect();
    let matching = cases
        .iter()
        .zip(&got)
        .filter(|((_, _, want), got)| want == *got)
        .count();
    outcome(matching == 4, format!("{matching}/4 intervals match: {got:?}"))
}

fn exactness() -> Outcome {
    let k = kernel(500, 100, 0.05);
    let curve = coverage_curve(&k, &cstar_table(&k).unwrap()).unwrap();
    let min = curve.iter().copied().fold(f64::INFINITY, f64::min);
    let mut instances = 0;
    let mut failures = Vec::new();
    for population in 1..=40 {
        for sample in 1..=population {
            for alpha in default_alphas() {
                let oracle = Oracle::new(population, sample, alpha.clone()).unwrap();
                let table = cstar_table(&kernel(population, sample, alpha.to_f64().unwrap())).unwrap();
                instances += 1;
                let ok = (0..=population).all(|m| oracle.is_level(&oracle.coverage(&table, m).unwrap()));
                if !ok {
                    failures.push(format!("N={population} n={sample} alpha={alpha}"));
                }
            }
        }
    }
    outcome(
        min >= 0.95 && failures.is_empty(),
        format!(
            "min coverage {min:.6} at N=500; exact coverage >= 1 - alpha on {}/{instances} grid instances",
            instances - failures.len()
        ),
    )
}

fn tally(report: &Report, names: &[&str]) -> (bool, String) {
    let mut ok = true;
    let mut parts = Vec::new();
    for name in names {
        match report.check(name) {
            Some(t) => {
                ok &= t.failed == 0 && t.passed > 0;
                parts.push(format!("{}/{}", t.passed, t.passed + t.failed));
            }
            None => {
                ok = false;
                parts.push(format!("missing check {name:?}"));
            }
        }
    }
    (ok, parts.join(", "))
}

fn optimality(report: &Report, elapsed: Duration) -> Outcome {
    let (ok, counts) = tally(
        report,
        &[
            "raw interval has minimum cardinality (exhaustive search)",
            "raw interval has maximum probability at that cardinality",
            "|C*| equals the bound when n or N is odd",
            "|C*| <= symmetric-set bound + 1",
            "N=20 n=6 alpha=3/5 has the +1 gap with A*(10) = [2, 4]",
        ],
    );
    let gap_ok = report.gap_instances.iter().any(|g| g == "N=20 n=6 alpha=3/5");
    outcome(
        ok && gap_ok && report.all_passed() && elapsed < Duration::from_secs(600),
        format!(
            "{} instances, checks {counts}; {} even-even gap instances; sweep {}",
            report.instances,
            report.gap_instances.len(),
            ms(elapsed)
        ),
    )
}

fn structure(report: &Report) -> Outcome {
    let (ok, counts) = tally(
        report,
        &[
            "up-shifted and down-shifted index sets are disjoint",
            "adjusted lengths equal raw lengths",
            "symmetric family endpoints nondecreasing",
            "C* is interval valued and symmetric",
            "|C*| equals |A*| by double counting",
        ],
    );
    outcome(ok, format!("checks {counts}; max shift {}", report.max_shift))
}

fn lemmas() -> Outcome {
    let report = lemma_suite(20).unwrap();
    let failed: Vec<&str> = report.checks.iter().filter(|c| c.failed > 0).map(|c| c.name).collect();
    outcome(
        report.all_passed() && report.checks.len() >= 9,
        format!(
            "{} properties over {} instances, failing: {failed:?}",
            report.checks.len(),
            report.instances
        ),
    )
}

fn performance() -> Outcome {
    let start = Instant::now();
    let k = kernel(1000, 500, 0.05);
    let table = cstar_table(&k).unwrap();
    let elapsed = start.elapsed();
    outcome(
        elapsed < Duration::from_secs(5),
        format!("N=1000 n=500 table (total {}) in {}", table.total_size(), ms(elapsed)),
    )
}

fn main() -> ExitCode {
    let start = Instant::now();
    let report = certify(&Grid::default()).unwrap();
    let sweep = start.elapsed();

    let results = [
        ("reference table reproduction", published_table()),
        ("pivot baseline", pivot_baseline()),
        ("published competitor dominance", competitor()),
        ("air-quality case study", air_quality()),
        ("exactness", exactness()),
        ("optimality certification", optimality(&report, sweep)),
        ("structural invariants", structure(&report)),
        ("distribution lemma suite", lemmas()),
        ("performance envelope", performance()),
    ];
    let mut all = true;
    for (i, (name, o)) in results.iter().enumerate() {
        all &= o.passed;
        println!(
            "{} criterion {}: {name}: {}",
            if o.passed { "PASS" } else { "FAIL" },
            i + 1,
            o.detail
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
