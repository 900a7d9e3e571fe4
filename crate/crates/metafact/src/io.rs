//! Matrix Market and CSV files, plus seeded synthetic test matrices.
//!
//! The internal model is dense, so coordinate files are densified on read
//! behind a hard size guard. Writers emit 17 significant digits, enough
//! to round-trip every finite f64 exactly.

use crate::kernels::qr;
use crate::matrix::Matrix;
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

/// Densification ceiling for coordinate reads: m·n above this is refused.
const DENSE_ENTRY_LIMIT: usize = 4_000_000;

fn perr(line: usize, message: impl Into<String>) -> Error {
    Error::ParseError {
        line,
        message: message.into(),
    }
}

fn parse_count(tok: &str, line: usize, what: &str) -> Result<usize> {
    tok.parse::<usize>()
        .map_err(|_| perr(line, format!("{} must be a non-negative integer, got {:?}", what, tok)))
}

fn parse_value(tok: &str, line: usize) -> Result<f64> {
    let v: f64 = tok
        .parse()
        .map_err(|_| perr(line, format!("expected a real number, got {:?}", tok)))?;
    if !v.is_finite() {
        return Err(perr(line, format!("non-finite value {:?}", tok)));
    }
    Ok(v)
}

struct MmHeader {
    coordinate: bool,
}

fn parse_mm_header(first: &str) -> Result<MmHeader> {
    let lower = first.to_ascii_lowercase();
    let mut toks = lower.split_whitespace();
    if toks.next() != Some("%%matrixmarket") {
        return Err(perr(1, "missing %%MatrixMarket banner"));
    }
    if toks.next() != Some("matrix") {
        return Err(Error::UnsupportedFormat(
            "only the matrix object is supported".into(),
        ));
    }
    let format = toks.next().unwrap_or_default();
    let coordinate = match format {
        "array" => false,
        "coordinate" => true,
        other => {
            return Err(Error::UnsupportedFormat(format!(
                "unknown format {:?}, expected array or coordinate",
                other
            )))
        }
    };
    match toks.next().unwrap_or_default() {
        "real" => {}
        other @ ("complex" | "integer" | "pattern") => {
            return Err(Error::UnsupportedFormat(format!(
                "{} field is not supported, only real",
                other
            )))
        }
        other => {
            return Err(Error::UnsupportedFormat(format!(
                "unknown field {:?}, expected real",
                other
            )))
        }
    }
    match toks.next().unwrap_or_default() {
        "general" => {}
        other @ ("symmetric" | "skew-symmetric" | "hermitian") => {
            return Err(Error::UnsupportedFormat(format!(
                "{} symmetry is not supported, only general",
                other
            )))
        }
        other => {
            return Err(Error::UnsupportedFormat(format!(
                "unknown symmetry {:?}, expected general",
                other
            )))
        }
    }
    Ok(MmHeader { coordinate })
}

/// Read `%%MatrixMarket matrix array|coordinate real general`.
/// Coordinate files are densified; duplicate entries are summed.
pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<Matrix> {
    let reader = BufReader::new(File::open(path.as_ref())?);
    let mut lines = reader.lines().enumerate();

    let (_, first) = lines
        .next()
        .ok_or_else(|| perr(1, "empty file, missing %%MatrixMarket banner"))?;
    let header = parse_mm_header(&first?)?;

    // size line: first non-comment, non-blank line after the banner
    let mut size_line = None;
    for (idx, line) in &mut lines {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        size_line = Some((idx + 1, trimmed.to_string()));
        break;
    }
    let (size_no, size_text) =
        size_line.ok_or_else(|| perr(2, "missing size line after the banner"))?;
    let toks: Vec<&str> = size_text.split_whitespace().collect();

    if header.coordinate {
        if toks.len() != 3 {
            return Err(perr(size_no, "coordinate size line must read: rows cols nnz"));
        }
        let m = parse_count(toks[0], size_no, "rows")?;
        let n = parse_count(toks[1], size_no, "cols")?;
        let nnz = parse_count(toks[2], size_no, "nnz")?;
        if m == 0 || n == 0 {
            return Err(perr(size_no, "dimensions must be at least 1"));
        }
        if m.saturating_mul(n) > DENSE_ENTRY_LIMIT {
            return Err(Error::InvalidDimension(format!(
                "coordinate file densifies to {}x{} = {} entries, above the {} limit",
                m,
                n,
                m.saturating_mul(n),
                DENSE_ENTRY_LIMIT
            )));
        }
        let mut a = Matrix::zeros(m, n);
        let mut seen = 0usize;
        let mut last_no = size_no;
        for (idx, line) in &mut lines {
            let no = idx + 1;
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('%') {
                continue;
            }
            last_no = no;
            if seen == nnz {
                return Err(perr(no, format!("extra data after {} entries", nnz)));
            }
            let t: Vec<&str> = trimmed.split_whitespace().collect();
            if t.len() != 3 {
                return Err(perr(no, "coordinate entry must read: row col value"));
            }
            let i = parse_count(t[0], no, "row index")?;
            let j = parse_count(t[1], no, "col index")?;
            if i < 1 || i > m || j < 1 || j > n {
                return Err(perr(
                    no,
                    format!("index ({}, {}) outside 1..={} x 1..={}", i, j, m, n),
                ));
            }
            a[(i - 1, j - 1)] += parse_value(t[2], no)?;
            seen += 1;
        }
        if seen < nnz {
            return Err(perr(
                last_no,
                format!("expected {} entries, found {}", nnz, seen),
            ));
        }
        Ok(a)
    } else {
        if toks.len() != 2 {
            return Err(perr(size_no, "array size line must read: rows cols"));
        }
        let m = parse_count(toks[0], size_no, "rows")?;
        let n = parse_count(toks[1], size_no, "cols")?;
        if m == 0 || n == 0 {
            return Err(perr(size_no, "dimensions must be at least 1"));
        }
        let total = m * n;
        let mut a = Matrix::zeros(m, n);
        let mut filled = 0usize;
        let mut last_no = size_no;
        for (idx, line) in &mut lines {
            let no = idx + 1;
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('%') {
                continue;
            }
            last_no = no;
            for tok in trimmed.split_whitespace() {
                if filled == total {
                    return Err(perr(no, format!("extra data after {} values", total)));
                }
                // column-major order per the format definition
                a[(filled % m, filled / m)] = parse_value(tok, no)?;
                filled += 1;
            }
        }
        if filled < total {
            return Err(perr(
                last_no,
                format!("expected {} values, found {}", total, filled),
            ));
        }
        Ok(a)
    }
}

/// Write `array real general`, one value per line in column-major order,
/// 17 significant digits.
pub fn write_matrix_market(a: &Matrix, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path.as_ref())?);
    writeln!(w, "%%MatrixMarket matrix array real general")?;
    writeln!(w, "{} {}", a.rows(), a.cols())?;
    for j in 0..a.cols() {
        for i in 0..a.rows() {
            writeln!(w, "{:.16e}", a[(i, j)])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Comma-separated values, one matrix row per line, no header.
pub fn read_csv(path: impl AsRef<Path>) -> Result<Matrix> {
    let reader = BufReader::new(File::open(path.as_ref())?);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let no = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|tok| parse_value(tok.trim(), no))
            .collect::<Result<Vec<f64>>>()?;
        if let Some(prev) = rows.first() {
            if row.len() != prev.len() {
                return Err(perr(
                    no,
                    format!("row has {} values, expected {}", row.len(), prev.len()),
                ));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(perr(1, "no data rows"));
    }
    let (m, n) = (rows.len(), rows[0].len());
    Ok(Matrix::from_raw(m, n, rows.into_iter().flatten().collect()))
}

pub fn write_csv(a: &Matrix, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path.as_ref())?);
    for i in 0..a.rows() {
        let row: Vec<String> = (0..a.cols()).map(|j| format!("{:.16e}", a[(i, j)])).collect();
        writeln!(w, "{}", row.join(","))?;
    }
    w.flush()?;
    Ok(())
}

/// What to synthesize. Each kind carries its own parameters, so a value
/// that exists is a value that makes sense.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SyntheticKind {
    /// Product of standard-normal m×k and k×n factors.
    RankK { k: usize },
    /// Prescribed spectrum σ_j = decay^j (j from 0), decay in (0,1).
    DecayingGeometric { decay: f64 },
    /// Prescribed spectrum σ_j = j^(−decay) (j from 1), decay > 0.
    DecayingPolynomial { decay: f64 },
    /// Rectangular identity: ones on the main diagonal.
    IdentityLike,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticSpec {
    pub m: usize,
    pub n: usize,
    pub kind: SyntheticKind,
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.n == 0 {
            return Err(Error::InvalidSpec(format!(
                "dimensions must be at least 1, got {}x{}",
                self.m, self.n
            )));
        }
        match self.kind {
            SyntheticKind::RankK { k } => {
                if k == 0 || k > self.m.min(self.n) {
                    return Err(Error::InvalidSpec(format!(
                        "rank {} not in 1..={} for a {}x{} matrix",
                        k,
                        self.m.min(self.n),
                        self.m,
                        self.n
                    )));
                }
            }
            SyntheticKind::DecayingGeometric { decay } => {
                if !(decay > 0.0 && decay < 1.0) {
                    return Err(Error::InvalidSpec(format!(
                        "geometric decay must lie in (0,1), got {}",
                        decay
                    )));
                }
            }
            SyntheticKind::DecayingPolynomial { decay } => {
                if !(decay > 0.0 && decay.is_finite()) {
                    return Err(Error::InvalidSpec(format!(
                        "polynomial decay must be positive, got {}",
                        decay
                    )));
                }
            }
            SyntheticKind::IdentityLike => {}
        }
        Ok(())
    }
}

fn gaussian(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
    let data: Vec<f64> = (0..rows * cols)
        .map(|_| rng.sample(rand_distr::StandardNormal))
        .collect();
    Matrix::from_raw(rows, cols, data)
}

/// Deterministic synthesis: the same spec always produces the same
/// matrix on a fixed build.
pub fn generate(spec: &SyntheticSpec) -> Result<Matrix> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (m, n) = (spec.m, spec.n);
    match spec.kind {
        SyntheticKind::RankK { k } => {
            let left = gaussian(&mut rng, m, k);
            let right = gaussian(&mut rng, k, n);
            Ok(left.dot(&right))
        }
        SyntheticKind::DecayingGeometric { decay } => {
            let p = m.min(n);
            let sv: Vec<f64> = (0..p).map(|j| decay.powi(j as i32)).collect();
            Ok(with_spectrum(&mut rng, m, n, &sv))
        }
        SyntheticKind::DecayingPolynomial { decay } => {
            let p = m.min(n);
            let sv: Vec<f64> = (1..=p).map(|j| (j as f64).powf(-decay)).collect();
            Ok(with_spectrum(&mut rng, m, n, &sv))
        }
        SyntheticKind::IdentityLike => Ok(Matrix::eye(m, n)),
    }
}

fn with_spectrum(rng: &mut ChaCha8Rng, m: usize, n: usize, sv: &[f64]) -> Matrix {
    let p = sv.len();
    let u = qr(&gaussian(rng, m, p), false, false).expect("gaussian qr").q;
    let v = qr(&gaussian(rng, n, p), false, false).expect("gaussian qr").q;
    u.dot(&Matrix::diag(sv)).dot(&v.t())
}
