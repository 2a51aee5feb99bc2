//! Dense CSV, sparse coordinate text, and vocabulary files.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::{DenseMatrix, SparseMatrix, Vector};

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::io(path, e))
}

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        msg: msg.into(),
    }
}

/// Reads comma-separated rows of non-negative numbers. A first row that does
/// not parse as numbers is treated as a header and skipped.
pub fn load_dense_csv(path: impl AsRef<Path>) -> Result<DenseMatrix> {
    let path = path.as_ref();
    parse_dense_csv(open(path)?, path)
}

/// [`load_dense_csv`] over any reader; `path` only labels errors.
pub fn parse_dense_csv(reader: impl Read, path: &Path) -> Result<DenseMatrix> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut data = Vec::new();
    let mut cols: Option<usize> = None;
    let mut rows = 0;
    for (idx, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(idx + 1, |p| p.line() as usize);
            parse_err(path, line, e.to_string())
        })?;
        let line = record.position().map_or(idx + 1, |p| p.line() as usize);
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        let parsed: Vec<Option<f64>> = record.iter().map(|f| f.parse::<f64>().ok()).collect();
        if idx == 0 && parsed.iter().any(Option::is_none) {
            continue;
        }
        match cols {
            None => cols = Some(record.len()),
            Some(c) if c != record.len() => {
                return Err(parse_err(
                    path,
                    line,
                    format!("row {line} has {} fields, expected {c}", record.len()),
                ));
            }
            Some(_) => {}
        }
        for (j, (value, raw)) in parsed.into_iter().zip(record.iter()).enumerate() {
            match value {
                Some(v) if v.is_finite() && v >= 0.0 => data.push(v),
                Some(v) => {
                    return Err(parse_err(
                        path,
                        line,
                        format!("row {line}, col {}: {v} is not a finite non-negative number", j + 1),
                    ))
                }
                None => {
                    return Err(parse_err(
                        path,
                        line,
                        format!("row {line}, col {}: {raw:?} is not a number", j + 1),
                    ))
                }
            }
        }
        rows += 1;
    }
    DenseMatrix::new(rows, cols.unwrap_or(0), data)
}

/// Writes one line per row using the shortest representation that reads
/// back to the same `f64`.
pub fn write_dense_csv(path: impl AsRef<Path>, m: &DenseMatrix) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::with_capacity(m.rows() * m.cols() * 20);
    for row in m.iter_rows() {
        push_row(&mut out, row);
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// One value per line.
pub fn write_vector_csv(path: impl AsRef<Path>, v: &Vector) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    for x in v.as_slice() {
        out.push_str(&format!("{x}\n"));
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Reads a single-column CSV as a vector.
pub fn load_vector_csv(path: impl AsRef<Path>) -> Result<Vector> {
    let path = path.as_ref();
    let m = load_dense_csv(path)?;
    if m.cols() != 1 && m.rows() > 0 {
        return Err(parse_err(path, 1, format!("expected one column, found {}", m.cols())));
    }
    Vector::new(m.into_vec())
}

fn push_row(out: &mut String, row: &[f64]) {
    for (j, x) in row.iter().enumerate() {
        if j > 0 {
            out.push(',');
        }
        out.push_str(&x.to_string());
    }
    out.push('\n');
}

/// Reads `row col value` lines (0-based, whitespace separated) into a
/// `rows x cols` matrix. Duplicate coordinates are summed. Blank lines and
/// lines starting with `%` or `#` are skipped.
pub fn load_sparse_coo(path: impl AsRef<Path>, rows: usize, cols: usize) -> Result<SparseMatrix> {
    let path = path.as_ref();
    let reader = BufReader::new(open(path)?);
    let mut triplets = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('%') || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [r, c, v] = fields[..] else {
            return Err(parse_err(path, lineno, format!("expected `row col value`, got {line:?}")));
        };
        let r: usize = r
            .parse()
            .map_err(|_| parse_err(path, lineno, format!("bad row index {r:?}")))?;
        let c: usize = c
            .parse()
            .map_err(|_| parse_err(path, lineno, format!("bad column index {c:?}")))?;
        let v: f64 = v
            .parse()
            .map_err(|_| parse_err(path, lineno, format!("bad value {v:?}")))?;
        if r >= rows || c >= cols {
            return Err(parse_err(
                path,
                lineno,
                format!("index ({r}, {c}) out of bounds for {rows}x{cols}"),
            ));
        }
        if !(v.is_finite() && v > 0.0) {
            return Err(parse_err(path, lineno, format!("value {v} must be finite and > 0")));
        }
        triplets.push((r, c, v));
    }
    SparseMatrix::from_triplets(rows, cols, triplets)
}

pub fn write_sparse_coo(path: impl AsRef<Path>, m: &SparseMatrix) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for (i, j, v) in m.triplets() {
        writeln!(w, "{i} {j} {v}").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// One token per line; line index is the column index.
pub fn load_vocabulary(path: impl AsRef<Path>) -> Result<Vec<String>> {
    let path = path.as_ref();
    let reader = BufReader::new(open(path)?);
    reader
        .lines()
        .map(|l| l.map(|s| s.trim_end_matches('\r').to_string()).map_err(|e| Error::io(path, e)))
        .collect()
}

pub fn write_vocabulary(path: impl AsRef<Path>, vocab: &[String]) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    for token in vocab {
        out.push_str(token);
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}
