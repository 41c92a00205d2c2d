//! Text output for tables and sweeps, and reading tables back.
//!
//! Delimited output has a header row, LF line endings, and optional footer
//! lines starting with `#`. Anything that varies between runs (wall time)
//! belongs in a footer the caller can leave out.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::hypergeom::Params;
use crate::invert::{ConfidenceTable, Method};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Tsv,
    /// Right-aligned columns for reading in a terminal.
    Pretty,
}

impl Format {
    fn delimiter(self) -> u8 {
        match self {
            Format::Tsv => b'\t',
            _ => b',',
        }
    }
}

/// Writes `header` and `rows` in `format`, then each footer line prefixed
/// with `# `.
pub fn write_records<W: Write>(
    out: &mut W,
    format: Format,
    header: &[&str],
    rows: &[Vec<String>],
    footer: &[String],
) -> Result<()> {
    match format {
        Format::Csv | Format::Tsv => {
            let mut w = csv::WriterBuilder::new()
                .delimiter(format.delimiter())
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(&mut *out);
            w.write_record(header).map_err(io_error)?;
            for row in rows {
                w.write_record(row).map_err(io_error)?;
            }
            w.flush().map_err(|e| Error::Io(e.to_string()))?;
        }
        Format::Pretty => {
            let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
            for row in rows {
                for (w, cell) in widths.iter_mut().zip(row) {
                    *w = (*w).max(cell.len());
                }
            }
            let line = |cells: &mut dyn Iterator<Item = &str>| -> String {
                cells
                    .zip(&widths)
                    .map(|(c, w)| format!("{c:>w$}"))
                    .collect::<Vec<_>>()
                    .join("  ")
            };
            writeln!(out, "{}", line(&mut header.iter().copied()))?;
            for row in rows {
                writeln!(out, "{}", line(&mut row.iter().map(String::as_str)))?;
            }
        }
    }
    for f in footer {
        writeln!(out, "# {f}")?;
    }
    Ok(())
}

fn io_error(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

/// Rows `x, L, U` followed by a `total size` footer.
pub fn write_table<W: Write>(
    out: &mut W,
    table: &ConfidenceTable,
    format: Format,
    extra_footer: &[String],
) -> Result<()> {
    let rows: Vec<Vec<String>> = (0..=table.params().sample())
        .map(|x| {
            let (l, u) = table.interval(x);
            vec![x.to_string(), l.to_string(), u.to_string()]
        })
        .collect();
    let mut footer = vec![format!("total size: {}", table.total_size())];
    footer.extend_from_slice(extra_footer);
    write_records(out, format, &["x", "L", "U"], &rows, &footer)
}

/// Rows `M, coverage`, one per `M` from zero.
pub fn write_coverage<W: Write>(out: &mut W, curve: &[f64], format: Format, footer: &[String]) -> Result<()> {
    let rows: Vec<Vec<String>> = curve
        .iter()
        .enumerate()
        .map(|(m, c)| vec![m.to_string(), c.to_string()])
        .collect();
    write_records(out, format, &["M", "coverage"], &rows, footer)
}

/// Parses delimited `x, L, U` rows (header required, `#` lines ignored)
/// back into a table, validating every table invariant.
pub fn read_table<R: Read>(input: R, params: Params, method: Method, format: Format) -> Result<ConfidenceTable> {
    if format == Format::Pretty {
        return Err(Error::Parse("pretty output is not machine readable".into()));
    }
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(format.delimiter())
        .comment(Some(b'#'))
        .from_reader(input);
    let header = reader.headers().map_err(|e| Error::Parse(e.to_string()))?;
    if header.iter().collect::<Vec<_>>() != ["x", "L", "U"] {
        return Err(Error::Parse(format!("unexpected header {header:?}")));
    }
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Parse(e.to_string()))?;
        let field = |k: usize| -> Result<usize> {
            record
                .get(k)
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| Error::Parse(format!("bad field {k} in row {i}")))
        };
        if field(0)? != i {
            return Err(Error::Parse(format!("row {i} has x = {}", field(0)?)));
        }
        lower.push(field(1)?);
        upper.push(field(2)?);
    }
    ConfidenceTable::from_parts(params, method, lower, upper)
}
