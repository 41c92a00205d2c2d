use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use hyperci::certify::{certify, default_alphas, lemma_suite, Grid, Parity};
use hyperci::io::{write_coverage, write_records, write_table, Format};
use hyperci::{
    coverage_curve, cstar_table, parse_rational, pivot_table, ConfidenceTable, Error, Hypergeometric, Params,
};
use rayon::prelude::*;

/// Environment variable holding the worker thread count.
const WORKERS_ENV: &str = "HYPERCI_WORKERS";

#[derive(Parser)]
#[command(
    name = "hyperci",
    version,
    about = "Exact size-optimal confidence intervals for the hypergeometric M"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Confidence interval for a single observed count.
    Ci {
        #[command(flatten)]
        instance: Instance,
        /// Observed number of special items in the sample.
        #[arg(long)]
        x: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Confidence intervals for every x in [0, n].
    Table {
        #[command(flatten)]
        instance: Instance,
        #[command(flatten)]
        output: Output,
    },
    /// Coverage probability at every M in [0, N].
    Coverage {
        #[command(flatten)]
        instance: Instance,
        #[command(flatten)]
        output: Output,
    },
    /// Total size and build time of both methods over a range of n.
    Compare {
        #[arg(long = "N")]
        population: usize,
        #[arg(long, default_value = "0.05")]
        alpha: f64,
        #[arg(long, default_value_t = 10)]
        n_start: usize,
        /// Inclusive; defaults to N - 10.
        #[arg(long)]
        n_end: Option<usize>,
        #[arg(long, default_value_t = 10)]
        n_step: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Check the construction against exhaustive exact search on a grid.
    Certify {
        /// Largest population in the grid (at most 200).
        #[arg(long = "max-N", default_value_t = 40)]
        max_population: usize,
        /// Exact alphas, as fractions or decimals.
        #[arg(long, value_delimiter = ',')]
        alphas: Vec<String>,
        #[arg(long, value_enum, default_value_t = ParityArg::All)]
        parity: ParityArg,
        /// Largest population for the distribution lemma checks; 0 skips them.
        #[arg(long = "lemmas-max-N", default_value_t = 20)]
        lemma_max_population: usize,
        /// Write the report here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Instance {
    /// Population size.
    #[arg(long = "N")]
    population: usize,
    /// Sample size.
    #[arg(long = "n")]
    sample: usize,
    #[arg(long, default_value = "0.05")]
    alpha: f64,
    #[arg(long, value_enum, default_value_t = MethodArg::Cstar)]
    method: MethodArg,
}

#[derive(Args)]
struct Output {
    /// Write to this file instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Leave out wall-clock timing so output is reproducible byte for byte.
    #[arg(long)]
    no_timing: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Cstar,
    Pivot,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Tsv,
    Pretty,
}

#[derive(Clone, Copy, ValueEnum)]
enum ParityArg {
    All,
    Odd,
    Even,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Tsv => Format::Tsv,
            FormatArg::Pretty => Format::Pretty,
        }
    }
}

impl From<ParityArg> for Parity {
    fn from(p: ParityArg) -> Self {
        match p {
            ParityArg::All => Parity::All,
            ParityArg::Odd => Parity::Odd,
            ParityArg::Even => Parity::Even,
        }
    }
}

enum Failure {
    Usage(String),
    Check(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParams { .. }
            | Error::OutOfRange { .. }
            | Error::Capacity { .. }
            | Error::BadRational(_)
            | Error::AlphaSplit { .. } => Failure::Usage(e.to_string()),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(msg) = configure_workers() {
        eprintln!("hyperci: {msg}");
        return ExitCode::from(2);
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("hyperci: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Check(msg)) | Err(Failure::Runtime(msg)) => {
            eprintln!("hyperci: {msg}");
            ExitCode::from(1)
        }
    }
}

fn configure_workers() -> Result<(), String> {
    let Ok(value) = std::env::var(WORKERS_ENV) else {
        return Ok(());
    };
    let threads: usize = value
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| format!("{WORKERS_ENV} must be a positive integer, got {value:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| e.to_string())
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Ci { instance, x, output } => {
            let (table, _) = build(&instance)?;
            if x > table.params().sample() {
                return Err(Failure::Usage(format!("x={x} exceeds n={}", table.params().sample())));
            }
            let (l, u) = table.interval(x);
            let mut out = sink(&output.output)?;
            match output.format.map(Format::from).unwrap_or(Format::Pretty) {
                Format::Pretty => writeln!(out, "[{l}, {u}]")?,
                format => {
                    let row = vec![x.to_string(), l.to_string(), u.to_string()];
                    write_records(&mut out, format, &["x", "L", "U"], &[row], &[])?;
                }
            }
            out.flush()?;
        }
        Command::Table { instance, output } => {
            let (table, elapsed) = build(&instance)?;
            let mut out = sink(&output.output)?;
            let footer = timing_footer(output.no_timing, elapsed);
            write_table(
                &mut out,
                &table,
                output.format.map(Format::from).unwrap_or_default(),
                &footer,
            )?;
            out.flush()?;
        }
        Command::Coverage { instance, output } => {
            let (table, elapsed) = build(&instance)?;
            let kernel = Hypergeometric::new(*table.params());
            let curve = coverage_curve(&kernel, &table)?;
            let mut out = sink(&output.output)?;
            let footer = timing_footer(output.no_timing, elapsed);
            write_coverage(
                &mut out,
                &curve,
                output.format.map(Format::from).unwrap_or_default(),
                &footer,
            )?;
            out.flush()?;
        }
        Command::Compare {
            population,
            alpha,
            n_start,
            n_end,
            n_step,
            output,
        } => {
            let n_end = n_end.unwrap_or(population.saturating_sub(10));
            if n_step == 0 || n_start == 0 || n_end > population || n_start > n_end {
                return Err(Failure::Usage(format!(
                    "need 1 <= n-start <= n-end <= N and n-step >= 1, got {n_start}..={n_end} step {n_step}"
                )));
            }
            let samples: Vec<usize> = (n_start..=n_end).step_by(n_step).collect();
            let rows = samples
                .par_iter()
                .map(|&n| compare_row(population, n, alpha, output.no_timing))
                .collect::<Result<Vec<_>, Failure>>()?;
            let mut header = vec!["n", "size_cstar", "size_pivot", "diff"];
            if !output.no_timing {
                header.extend(["time_cstar_ms", "time_pivot_ms"]);
            }
            let mut out = sink(&output.output)?;
            write_records(
                &mut out,
                output.format.map(Format::from).unwrap_or_default(),
                &header,
                &rows,
                &[],
            )?;
            out.flush()?;
        }
        Command::Certify {
            max_population,
            alphas,
            parity,
            lemma_max_population,
            output,
        } => {
            let alphas = if alphas.is_empty() {
                default_alphas()
            } else {
                alphas
                    .iter()
                    .map(|a| parse_rational(a))
                    .collect::<hyperci::Result<Vec<_>>>()?
            };
            let grid = Grid {
                max_population,
                alphas,
                parity: parity.into(),
            };
            let start = Instant::now();
            let report = certify(&grid)?;
            let mut out = sink(&output)?;
            writeln!(out, "{report}")?;
            let mut passed = report.all_passed();
            if lemma_max_population > 0 {
                let lemmas = lemma_suite(lemma_max_population)?;
                writeln!(out, "\n{lemmas}")?;
                passed &= lemmas.all_passed();
            }
            writeln!(out, "\nelapsed: {:.2} s", start.elapsed().as_secs_f64())?;
            out.flush()?;
            if !passed {
                return Err(Failure::Check("certification failed".into()));
            }
        }
    }
    Ok(())
}

fn build(instance: &Instance) -> Result<(ConfidenceTable, Duration), Failure> {
    let params = Params::new(instance.population, instance.sample, instance.alpha)?;
    let kernel = Hypergeometric::new(params);
    let start = Instant::now();
    let table = match instance.method {
        MethodArg::Cstar => cstar_table(&kernel)?,
        MethodArg::Pivot => pivot_table(&kernel)?,
    };
    Ok((table, start.elapsed()))
}

fn compare_row(population: usize, sample: usize, alpha: f64, no_timing: bool) -> Result<Vec<String>, Failure> {
    let kernel = Hypergeometric::new(Params::new(population, sample, alpha)?);
    let start = Instant::now();
    let cstar = cstar_table(&kernel)?;
    let cstar_time = start.elapsed();
    let start = Instant::now();
    let pivot = pivot_table(&kernel)?;
    let pivot_time = start.elapsed();
    let diff = pivot.total_size() as i64 - cstar.total_size() as i64;
    let mut row = vec![
        sample.to_string(),
        cstar.total_size().to_string(),
        pivot.total_size().to_string(),
        diff.to_string(),
    ];
    if !no_timing {
        row.push(format!("{:.3}", cstar_time.as_secs_f64() * 1e3));
        row.push(format!("{:.3}", pivot_time.as_secs_f64() * 1e3));
    }
    Ok(row)
}

fn timing_footer(no_timing: bool, elapsed: Duration) -> Vec<String> {
    if no_timing {
        Vec::new()
    } else {
        vec![format!("elapsed: {:.4} s", elapsed.as_secs_f64())]
    }
}

fn sink(path: &Option<PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}
