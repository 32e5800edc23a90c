//! CSV ingestion and output of point clouds.
//!
//! Input is one point per record, every field a finite real. Row numbers in
//! diagnostics are 1-based physical lines, so a header counts as row 1.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use crate::geometry::PointCloud;
use crate::numerics::fmt::fmt_sig;
use crate::{Error, Result};

/// Significant digits written per coordinate; enough to round-trip an `f64`.
pub const WRITE_DIGITS: usize = 17;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CsvOptions {
    pub delimiter: u8,
    pub has_header: bool,
}

impl Default for CsvOptions {
    fn default() -> Self {
        Self { delimiter: b',', has_header: false }
    }
}

/// Parse a delimiter given on the command line: a single byte, or one of
/// `tab`, `\t`, `space`.
pub fn parse_delimiter(s: &str) -> Result<u8> {
    match s {
        "tab" | "\\t" | "\t" => Ok(b'\t'),
        "space" | " " => Ok(b' '),
        _ if s.len() == 1 && s.is_ascii() => Ok(s.as_bytes()[0]),
        _ => Err(Error::invalid(format!("delimiter must be a single ASCII character, got '{s}'"))),
    }
}

pub fn parse_csv<R: Read>(input: R, opts: &CsvOptions) -> Result<PointCloud> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(opts.delimiter)
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let mut data = Vec::new();
    let mut width: Option<usize> = None;
    let mut n = 0usize;
    let mut record = csv::StringRecord::new();
    let mut first = true;
    loop {
        let more = reader.read_record(&mut record).map_err(|e| {
            let row = e.position().map_or(0, |p| p.line() as usize);
            Error::Parse { row, col: 0, msg: e.to_string() }
        })?;
        if !more {
            break;
        }
        let row = record.position().map_or(n + 1, |p| p.line() as usize);
        if first && opts.has_header {
            first = false;
            continue;
        }
        first = false;
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        match width {
            None => width = Some(record.len()),
            Some(w) if w != record.len() => {
                return Err(Error::Parse {
                    row,
                    col: record.len().min(w) + 1,
                    msg: format!("expected {w} fields, found {}", record.len()),
                })
            }
            _ => {}
        }
        for (c, field) in record.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| Error::Parse {
                row,
                col: c + 1,
                msg: format!("'{field}' is not a number"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse { row, col: c + 1, msg: format!("'{field}' is not finite") });
            }
            data.push(v);
        }
        n += 1;
    }
    if n < 2 {
        return Err(Error::Parse { row: n + 1, col: 0, msg: format!("need at least 2 data rows, found {n}") });
    }
    PointCloud::new(n, width.unwrap_or(0), data)
}

pub fn read_csv(path: &Path, opts: &CsvOptions) -> Result<PointCloud> {
    let f = File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_csv(std::io::BufReader::new(f), opts)
}

/// Headerless CSV, one point per line, [`WRITE_DIGITS`] significant digits.
pub fn write_csv<W: Write>(cloud: &PointCloud, out: W) -> Result<()> {
    let mut out = BufWriter::new(out);
    let mut line = String::new();
    for row in cloud.rows() {
        line.clear();
        for (j, v) in row.iter().enumerate() {
            if j > 0 {
                line.push(',');
            }
            line.push_str(&fmt_sig(*v, WRITE_DIGITS));
        }
        line.push('\n');
        out.write_all(line.as_bytes())?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_csv_file(cloud: &PointCloud, path: &Path) -> Result<()> {
    let f = File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    write_csv(cloud, f)
}
