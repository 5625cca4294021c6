//! Matrix file formats: MatrixMarket coordinate files, headered TSV
//! triplets, and headerless CSV for dense factors.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::dense::Mat;
use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;

/// Formats with 17 significant digits, enough for exact f64 round trips.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

/// Reads a MatrixMarket coordinate file (`real` or `integer` field,
/// `general` or `symmetric` symmetry, 1-indexed). Duplicate entries are
/// summed; symmetric files are expanded to full storage.
pub fn load_matrix_market(path: impl AsRef<Path>) -> Result<SparseMatrix> {
    let text = fs::read_to_string(path)?;
    parse_matrix_market(&text)
}

pub fn parse_matrix_market(text: &str) -> Result<SparseMatrix> {
    let mut lines = text.lines().enumerate();
    let (lno, header) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let tokens: Vec<String> = header
        .split_whitespace()
        .map(|t| t.to_lowercase())
        .collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" {
        return Err(parse_err(
            lno + 1,
            "expected `%%MatrixMarket object format field symmetry` header",
        ));
    }
    if tokens[1] != "matrix" || tokens[2] != "coordinate" {
        return Err(parse_err(
            lno + 1,
            format!("unsupported object/format `{} {}`", tokens[1], tokens[2]),
        ));
    }
    if tokens[3] != "real" && tokens[3] != "integer" {
        return Err(parse_err(
            lno + 1,
            format!("unsupported field `{}`", tokens[3]),
        ));
    }
    let symmetric = match tokens[4].as_str() {
        "general" => false,
        "symmetric" => true,
        other => {
            return Err(parse_err(
                lno + 1,
                format!("unsupported symmetry `{other}`"),
            ))
        }
    };

    // size line: first non-comment, non-blank line
    let mut size: Option<(usize, usize, usize)> = None;
    let mut entries: Vec<(usize, usize, f64)> = Vec::new();
    let mut seen = 0usize;
    for (idx, raw) in lines {
        let lno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        match size {
            None => {
                if fields.len() != 3 {
                    return Err(parse_err(lno, "size line must be `rows cols nnz`"));
                }
                let n: usize = fields[0]
                    .parse()
                    .map_err(|_| parse_err(lno, "bad row count"))?;
                let d: usize = fields[1]
                    .parse()
                    .map_err(|_| parse_err(lno, "bad column count"))?;
                let nnz: usize = fields[2]
                    .parse()
                    .map_err(|_| parse_err(lno, "bad entry count"))?;
                if symmetric && n != d {
                    return Err(parse_err(lno, "symmetric matrix must be square"));
                }
                size = Some((n, d, nnz));
                entries.reserve(if symmetric { 2 * nnz } else { nnz });
            }
            Some((n, d, nnz)) => {
                if fields.len() != 3 {
                    return Err(parse_err(lno, "entry line must be `row col value`"));
                }
                let i: usize = fields[0]
                    .parse()
                    .map_err(|_| parse_err(lno, "bad row index"))?;
                let j: usize = fields[1]
                    .parse()
                    .map_err(|_| parse_err(lno, "bad column index"))?;
                let v: f64 = fields[2].parse().map_err(|_| parse_err(lno, "bad value"))?;
                if i < 1 || i > n || j < 1 || j > d {
                    return Err(parse_err(
                        lno,
                        format!("entry ({i}, {j}) out of range for {n}x{d} matrix"),
                    ));
                }
                seen += 1;
                if seen > nnz {
                    return Err(parse_err(
                        lno,
                        format!("more than the declared {nnz} entries"),
                    ));
                }
                entries.push((i - 1, j - 1, v));
                if symmetric && i != j {
                    entries.push((j - 1, i - 1, v));
                }
            }
        }
    }
    let (n, d, nnz) = size.ok_or_else(|| parse_err(1, "missing size line"))?;
    if seen != nnz {
        return Err(parse_err(
            1,
            format!("entry count mismatch: header declares {nnz}, file has {seen}"),
        ));
    }
    SparseMatrix::from_triplets(n, d, entries)
}

pub fn write_matrix_market(path: impl AsRef<Path>, a: &SparseMatrix) -> Result<()> {
    let mut out = String::new();
    out.push_str("%%MatrixMarket matrix coordinate real general\n");
    out.push_str(&format!("{} {} {}\n", a.n_rows(), a.n_cols(), a.nnz()));
    for (i, j, v) in a.iter() {
        out.push_str(&format!("{} {} {}\n", i + 1, j + 1, fmt_f64(v)));
    }
    fs::write(path, out)?;
    Ok(())
}

/// Reads 0-indexed triplets (`row`, `col`, `value` separated by whitespace)
/// preceded by a `#rows cols` header line.
pub fn load_tsv(path: impl AsRef<Path>) -> Result<SparseMatrix> {
    let text = fs::read_to_string(path)?;
    parse_tsv(&text)
}

pub fn parse_tsv(text: &str) -> Result<SparseMatrix> {
    let mut size: Option<(usize, usize)> = None;
    let mut entries = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let lno = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if size.is_none() {
            let rest = line
                .strip_prefix('#')
                .ok_or_else(|| parse_err(lno, "expected `#rows cols` header"))?;
            let fields: Vec<&str> = rest.split_whitespace().collect();
            if fields.len() != 2 {
                return Err(parse_err(lno, "header must contain exactly `rows cols`"));
            }
            let n = fields[0]
                .parse()
                .map_err(|_| parse_err(lno, "bad row count"))?;
            let d = fields[1]
                .parse()
                .map_err(|_| parse_err(lno, "bad column count"))?;
            size = Some((n, d));
            continue;
        }
        let (n, d) = size.unwrap();
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(parse_err(lno, "entry line must be `row<TAB>col<TAB>value`"));
        }
        let i: usize = fields[0]
            .parse()
            .map_err(|_| parse_err(lno, "bad row index"))?;
        let j: usize = fields[1]
            .parse()
            .map_err(|_| parse_err(lno, "bad column index"))?;
        let v: f64 = fields[2].parse().map_err(|_| parse_err(lno, "bad value"))?;
        if i >= n || j >= d {
            return Err(parse_err(
                lno,
                format!("entry ({i}, {j}) out of range for {n}x{d} matrix"),
            ));
        }
        entries.push((i, j, v));
    }
    let (n, d) = size.ok_or_else(|| parse_err(1, "empty file"))?;
    SparseMatrix::from_triplets(n, d, entries)
}

/// Loads a sparse matrix, sniffing the format: MatrixMarket if the file
/// starts with `%%MatrixMarket`, headered TSV if it starts with `#`.
pub fn load_matrix(path: impl AsRef<Path>) -> Result<SparseMatrix> {
    let text = fs::read_to_string(path)?;
    let head = text.trim_start();
    if head.to_lowercase().starts_with("%%matrixmarket") {
        parse_matrix_market(&text)
    } else if head.starts_with('#') {
        parse_tsv(&text)
    } else {
        Err(parse_err(
            1,
            "unrecognized matrix format (expected MatrixMarket or `#rows cols` TSV)",
        ))
    }
}

/// Writes a dense matrix as headerless CSV, one row per line, full
/// double precision.
pub fn write_csv_matrix(path: impl AsRef<Path>, m: &Mat) -> Result<()> {
    let file = fs::File::create(path)?;
    let mut w = std::io::BufWriter::new(file);
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(|&v| fmt_f64(v)).collect();
        writeln!(w, "{}", row.join(","))?;
    }
    w.flush()?;
    Ok(())
}

/// Writes a vector as a single-column CSV.
pub fn write_csv_vector(path: impl AsRef<Path>, v: &[f64]) -> Result<()> {
    let file = fs::File::create(path)?;
    let mut w = std::io::BufWriter::new(file);
    for x in v {
        writeln!(w, "{}", fmt_f64(*x))?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a headerless numeric CSV into a dense matrix. Ragged rows are an
/// error.
pub fn read_csv_matrix(path: impl AsRef<Path>) -> Result<Mat> {
    let text = fs::read_to_string(path)?;
    parse_csv_matrix(&text)
}

pub fn parse_csv_matrix(text: &str) -> Result<Mat> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width: Option<usize> = None;
    for (idx, raw) in text.lines().enumerate() {
        let lno = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let row: Result<Vec<f64>> = line
            .split(',')
            .map(|f| {
                f.trim()
                    .parse::<f64>()
                    .map_err(|_| parse_err(lno, format!("bad number `{}`", f.trim())))
            })
            .collect();
        let row = row?;
        match width {
            None => width = Some(row.len()),
            Some(w) if w != row.len() => {
                return Err(parse_err(
                    lno,
                    format!("ragged CSV: expected {w} fields, found {}", row.len()),
                ))
            }
            _ => {}
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(parse_err(1, "empty CSV"));
    }
    Mat::from_rows(rows)
}

pub fn read_csv_vector(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let m = read_csv_matrix(path)?;
    if m.cols() == 1 {
        Ok(m.col(0))
    } else if m.rows() == 1 {
        Ok(m.row(0).to_vec())
    } else {
        Err(Error::DimensionMismatch(format!(
            "expected a vector, found {}x{} CSV",
            m.rows(),
            m.cols()
        )))
    }
}
