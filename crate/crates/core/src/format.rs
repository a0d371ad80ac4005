//! Plain-text interchange formats: distance matrices, persistence diagrams and
//! the fixed-precision number rendering shared by every writer.

use std::fmt::Write as _;
use std::io::BufRead;

use thiserror::Error;

use crate::ph::{Bar, DistanceError, DistanceMatrix, PersistenceDiagram};

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("read failed at line {line}: {source}")]
    Io {
        line: usize,
        #[source]
        source: std::io::Error,
    },
}

fn syntax(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax { line, message: message.into() }
}

/// Renders a number with 12 significant digits, trailing zeros trimmed.
/// Infinite values render as `inf` / `-inf`.
pub fn fmt_num(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{v:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let fixed = format!("{:.*}", (11 - exp) as usize, v);
        trim_zeros(&fixed).to_string()
    } else {
        format!("{}e{}", trim_zeros(mantissa), exp)
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Errors from reading a distance matrix, split by exit-code class.
#[derive(Debug, Error)]
pub enum MatrixReadError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Invalid(#[from] DistanceError),
}

/// Reads `n` on the first line followed by `n` rows of `n` whitespace-separated numbers.
pub fn read_distance_matrix(reader: impl BufRead) -> Result<DistanceMatrix, MatrixReadError> {
    let mut lines = Vec::new();
    for (k, line) in reader.lines().enumerate() {
        let line = line.map_err(|source| ParseError::Io { line: k + 1, source })?;
        if !line.trim().is_empty() {
            lines.push((k + 1, line));
        }
    }
    let mut it = lines.into_iter();
    let (first, header) = it.next().ok_or_else(|| syntax(1, "missing point count"))?;
    let n: usize =
        header.trim().parse().map_err(|_| syntax(first, format!("expected point count, got '{}'", header.trim())))?;
    let mut entries = Vec::with_capacity(n * n);
    let mut last = first;
    for row in 0..n {
        let (line, text) = it.next().ok_or_else(|| syntax(last + 1, format!("expected {n} rows, found {row}")))?;
        last = line;
        let before = entries.len();
        for field in text.split_whitespace() {
            let v: f64 = field.parse().map_err(|_| syntax(line, format!("invalid number '{field}'")))?;
            entries.push(v);
        }
        if entries.len() - before != n {
            return Err(syntax(line, format!("expected {n} values, found {}", entries.len() - before)).into());
        }
    }
    if let Some((line, _)) = it.next() {
        return Err(syntax(line, format!("unexpected content after {n} rows")).into());
    }
    Ok(DistanceMatrix::new(n, entries)?)
}

pub fn write_distance_matrix(dist: &DistanceMatrix) -> String {
    let mut out = format!("{}\n", dist.len());
    for i in 0..dist.len() {
        let row: Vec<String> = dist.row(i).iter().map(|&v| fmt_num(v)).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

/// One `dim birth death` line per bar, dimension 0 first.
pub fn write_diagram(pd: &PersistenceDiagram) -> String {
    let mut out = String::new();
    for (dim, bars) in [(0, &pd.dim0), (1, &pd.dim1)] {
        for b in bars.iter() {
            writeln!(out, "{dim} {} {}", fmt_num(b.birth), fmt_num(b.death)).unwrap();
        }
    }
    out
}

pub fn read_diagram(reader: impl BufRead) -> Result<PersistenceDiagram, ParseError> {
    let (mut dim0, mut dim1) = (Vec::new(), Vec::new());
    for (k, line) in reader.lines().enumerate() {
        let line_no = k + 1;
        let line = line.map_err(|source| ParseError::Io { line: line_no, source })?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        let [dim, birth, death] = fields[..] else {
            return Err(syntax(line_no, "expected 'dim birth death'"));
        };
        let num = |s: &str| -> Result<f64, ParseError> {
            match s {
                "inf" => Ok(f64::INFINITY),
                _ => s.parse().map_err(|_| syntax(line_no, format!("invalid number '{s}'"))),
            }
        };
        let bar = Bar::new(num(birth)?, num(death)?);
        if !bar.birth.is_finite() || bar.death < bar.birth {
            return Err(syntax(line_no, "birth must be finite and not exceed death"));
        }
        match dim {
            "0" => dim0.push(bar),
            "1" => dim1.push(bar),
            other => return Err(syntax(line_no, format!("dimension must be 0 or 1, got '{other}'"))),
        }
    }
    Ok(PersistenceDiagram::new(dim0, dim1))
}
