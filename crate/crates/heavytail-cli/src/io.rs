//! CSV input/output and error-to-exit-code mapping.

use std::fmt;
use std::fs;
use std::path::Path;

use heavytail_core::{DataMatrix, Error as CoreError, SpdMatrix, SquareMatrix};

/// How a failure maps to the process exit code: 2 for input problems,
/// 3 for numerical failures, 1 for everything else.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Input,
    Numerical,
    Internal,
}

impl ErrorKind {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::Input => 2,
            ErrorKind::Numerical => 3,
            ErrorKind::Internal => 1,
        }
    }
}

#[derive(Debug)]
pub struct CliError {
    pub kind: ErrorKind,
    pub message: String,
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        Self {
            kind: ErrorKind::Input,
            message: message.into(),
        }
    }

    pub fn numerical(message: impl Into<String>) -> Self {
        Self {
            kind: ErrorKind::Numerical,
            message: message.into(),
        }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self {
            kind: ErrorKind::Internal,
            message: message.into(),
        }
    }
}

/// Estimation-time failure: numerical exit code.
pub fn numerical(err: CoreError) -> CliError {
    CliError::numerical(err.to_string())
}

pub type CliResult<T> = Result<T, CliError>;

/// Canonical float formatting: the shortest decimal string that parses
/// back to the same f64, so written files round-trip bitwise.
pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

fn parse_field(raw: &str, row: usize, col: usize) -> CliResult<f64> {
    let t = raw.trim();
    let v: f64 = t
        .parse()
        .map_err(|_| CliError::input(format!("parse error at row {row}, column {col}: '{t}'")))?;
    if !v.is_finite() {
        return Err(CliError::input(format!(
            "non-finite value at row {row}, column {col}: '{t}'"
        )));
    }
    Ok(v)
}

/// Parse numeric CSV rows: comma separator, decimal point, optional single
/// header line auto-detected as a first line with any non-numeric field.
/// Row/column indices in errors are 1-based over the numeric part.
fn parse_numeric_csv(path: &Path) -> CliResult<Vec<Vec<f64>>> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
    let mut lines: Vec<&str> = text.lines().collect();
    while matches!(lines.last(), Some(l) if l.trim().is_empty()) {
        lines.pop();
    }
    if lines.is_empty() {
        return Err(CliError::input(format!("{} is empty", path.display())));
    }
    let header = lines[0]
        .split(',')
        .any(|field| field.trim().parse::<f64>().is_err());
    let start = usize::from(header);
    let mut rows = Vec::with_capacity(lines.len() - start);
    for (i, line) in lines[start..].iter().enumerate() {
        let row = line
            .split(',')
            .enumerate()
            .map(|(j, field)| parse_field(field, i + 1, j + 1))
            .collect::<CliResult<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok(rows)
}

/// Load observations (rows) from CSV and validate them as a data matrix.
pub fn load_csv(path: &Path) -> CliResult<DataMatrix> {
    let rows = parse_numeric_csv(path)?;
    DataMatrix::from_rows(&rows).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

/// Load a p x p positive-definite matrix from CSV, validated exactly like
/// any other scatter input.
pub fn load_scatter_csv(path: &Path, expected_p: usize) -> CliResult<SpdMatrix> {
    let rows = parse_numeric_csv(path)?;
    if rows.len() != expected_p {
        return Err(CliError::input(format!(
            "{}: scatter matrix has {} rows, expected {expected_p}",
            path.display(),
            rows.len()
        )));
    }
    let square = SquareMatrix::from_rows(&rows)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    SpdMatrix::new(square).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

/// Write to the path, or to stdout when no path is given.
pub fn write_output(path: Option<&Path>, content: &str) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, content)
            .map_err(|e| CliError::internal(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

/// Data matrix serialized as CSV with an `x1,...,xp` header; floats use
/// the canonical round-trip format.
pub fn data_to_csv(data: &DataMatrix) -> String {
    let header: Vec<String> = (1..=data.p()).map(|j| format!("x{j}")).collect();
    let mut out = header.join(",");
    out.push('\n');
    for row in data.rows() {
        let mut first = true;
        for v in row {
            if !first {
                out.push(',');
            }
            out.push_str(&fmt_f64(*v));
            first = false;
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn tmp(name: &str, content: &str) -> std::path::PathBuf {
        let dir = std::env::temp_dir().join("heavytail-io-tests");
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join(name);
        let mut f = fs::File::create(&path).unwrap();
        f.write_all(content.as_bytes()).unwrap();
        path
    }

    #[test]
    fn header_detection() {
        let p = tmp("h1.csv", "x\n1\n2\n");
        let d = load_csv(&p).unwrap();
        assert_eq!((d.n(), d.p()), (2, 1));
    }

    #[test]
    fn no_header() {
        let p = tmp("h2.csv", "1,0\n0,1\n");
        let d = load_csv(&p).unwrap();
        assert_eq!((d.n(), d.p()), (2, 2));
        assert_eq!(d.row(0), &[1.0, 0.0]);
    }

    #[test]
    fn parse_error_reports_row_and_column() {
        let p = tmp("h3.csv", "1,2\n3,abc\n");
        let e = load_csv(&p).unwrap_err();
        assert_eq!(e.kind, ErrorKind::Input);
        assert!(e.message.contains("row 2"), "{}", e.message);
        assert!(e.message.contains("column 2"), "{}", e.message);
    }

    #[test]
    fn non_finite_rejected_with_row_index() {
        let p = tmp("h4.csv", "1,2\ninf,4\n");
        let e = load_csv(&p).unwrap_err();
        assert_eq!(e.kind, ErrorKind::Input);
        assert!(e.message.contains("row 2"), "{}", e.message);
    }

    #[test]
    fn csv_round_trip_is_bitwise() {
        let rows = vec![
            vec![0.1 + 0.2, -1.5e-13, 3.0],
            vec![std::f64::consts::PI, 2.0f64.sqrt(), -0.0],
        ];
        let data = DataMatrix::from_rows(&rows).unwrap();
        let text = data_to_csv(&data);
        let p = tmp("h5.csv", &text);
        let parsed = load_csv(&p).unwrap();
        assert_eq!(parsed, data);
    }
}
