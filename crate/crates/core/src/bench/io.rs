//! Matrix file formats: Matrix Market and a plain dense text layout.
//!
//! Dense text is the dimension `n` on the first line followed by `n` rows of
//! `n` whitespace-separated numbers.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::matrix::SymMatrix;

/// Relative asymmetry (w.r.t. the largest absolute entry) tolerated on input.
pub const SYMMETRY_REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixFormat {
    MatrixMarket,
    DenseText,
    /// Matrix Market if the file starts with a `%%MatrixMarket` banner, dense text otherwise.
    Auto,
}

impl FromStr for MatrixFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "matrix-market" | "mm" | "mtx" => Ok(MatrixFormat::MatrixMarket),
            "dense-text" | "dense" => Ok(MatrixFormat::DenseText),
            "auto" => Ok(MatrixFormat::Auto),
            _ => Err(Error::invalid(format!("unknown matrix format {s:?}"))),
        }
    }
}

impl fmt::Display for MatrixFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MatrixFormat::MatrixMarket => "matrix-market",
            MatrixFormat::DenseText => "dense-text",
            MatrixFormat::Auto => "auto",
        })
    }
}

pub fn load_matrix(path: &Path, format: MatrixFormat) -> Result<SymMatrix> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
    parse_matrix(&text, format, path)
}

/// Parses `text`; `origin` only labels errors.
pub fn parse_matrix(text: &str, format: MatrixFormat, origin: &Path) -> Result<SymMatrix> {
    let format = match format {
        MatrixFormat::Auto if text.trim_start().starts_with("%%MatrixMarket") => {
            MatrixFormat::MatrixMarket
        }
        MatrixFormat::Auto => MatrixFormat::DenseText,
        f => f,
    };
    let mut p = Parser::new(text, origin);
    match format {
        MatrixFormat::MatrixMarket => p.matrix_market(),
        _ => p.dense_text(),
    }
}

struct Parser<'a> {
    lines: std::iter::Peekable<std::iter::Enumerate<std::str::Lines<'a>>>,
    origin: PathBuf,
    line: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str, origin: &Path) -> Self {
        Parser {
            lines: text.lines().enumerate().peekable(),
            origin: origin.to_path_buf(),
            line: 0,
        }
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse {
            path: self.origin.clone(),
            line: self.line,
            msg: msg.into(),
        }
    }

    /// Next line that is neither blank nor a `%` comment.
    fn next_content(&mut self) -> Option<&'a str> {
        for (k, l) in self.lines.by_ref() {
            self.line = k + 1;
            let t = l.trim();
            if !t.is_empty() && !t.starts_with('%') {
                return Some(t);
            }
        }
        None
    }

    fn number<T: FromStr>(&self, tok: &str) -> Result<T> {
        tok.parse()
            .map_err(|_| self.err(format!("cannot parse {tok:?} as a number")))
    }

    fn dense_text(&mut self) -> Result<SymMatrix> {
        let first = self.next_content().ok_or_else(|| self.err("empty input"))?;
        let n: usize = self.number(first)?;
        if n == 0 {
            return Err(self.err("dimension must be at least 1"));
        }
        let mut rows = Vec::with_capacity(n);
        for r in 0..n {
            let line = self
                .next_content()
                .ok_or_else(|| self.err(format!("expected {n} rows, found {r}")))?;
            let row = line
                .split_whitespace()
                .map(|t| self.number::<f64>(t))
                .collect::<Result<Vec<_>>>()?;
            if row.len() != n {
                return Err(self.err(format!(
                    "row {} has {} entries, expected {n} (matrix must be square)",
                    r + 1,
                    row.len()
                )));
            }
            rows.push(row);
        }
        if let Some(extra) = self.next_content() {
            return Err(self.err(format!("unexpected trailing content {extra:?}")));
        }
        SymMatrix::from_rows_with_tol(&rows, SYMMETRY_REL_TOL)
    }

    fn matrix_market(&mut self) -> Result<SymMatrix> {
        let (k, banner) = self.lines.next().ok_or_else(|| self.err("empty input"))?;
        self.line = k + 1;
        let fields: Vec<String> = banner
            .split_whitespace()
            .map(|s| s.to_ascii_lowercase())
            .collect();
        if fields.len() != 5 || fields[0] != "%%matrixmarket" || fields[1] != "matrix" {
            return Err(self.err(format!("bad Matrix Market banner {banner:?}")));
        }
        let coordinate = match fields[2].as_str() {
            "coordinate" => true,
            "array" => false,
            other => return Err(self.err(format!("unsupported storage {other:?}"))),
        };
        if !matches!(fields[3].as_str(), "real" | "integer" | "double") {
            return Err(self.err(format!("unsupported field {:?}", fields[3])));
        }
        let symmetric = match fields[4].as_str() {
            "symmetric" => true,
            "general" => false,
            other => return Err(self.err(format!("unsupported symmetry {other:?}"))),
        };

        let size = self
            .next_content()
            .ok_or_else(|| self.err("missing size line"))?;
        let dims = size
            .split_whitespace()
            .map(|t| self.number::<usize>(t))
            .collect::<Result<Vec<_>>>()?;
        let expected_len = if coordinate { 3 } else { 2 };
        if dims.len() != expected_len {
            return Err(self.err(format!(
                "size line {size:?} should have {expected_len} fields"
            )));
        }
        let (rows, cols) = (dims[0], dims[1]);
        if rows != cols {
            return Err(self.err(format!("matrix is not square: {rows}x{cols}")));
        }
        let n = rows;
        if n == 0 {
            return Err(self.err("dimension must be at least 1"));
        }

        let mut dense = vec![vec![0.0f64; n]; n];
        if coordinate {
            let nnz = dims[2];
            let mut seen = vec![vec![false; n]; n];
            for e in 0..nnz {
                let line = self
                    .next_content()
                    .ok_or_else(|| self.err(format!("expected {nnz} entries, found {e}")))?;
                let toks: Vec<&str> = line.split_whitespace().collect();
                if toks.len() != 3 {
                    return Err(self.err(format!("entry {line:?} should be `row col value`")));
                }
                let i: usize = self.number(toks[0])?;
                let j: usize = self.number(toks[1])?;
                let v: f64 = self.number(toks[2])?;
                if i == 0 || j == 0 || i > n || j > n {
                    return Err(self.err(format!("entry ({i}, {j}) outside 1..={n}")));
                }
                let (i, j) = (i - 1, j - 1);
                if seen[i][j] || (symmetric && seen[j][i]) {
                    return Err(self.err(format!("duplicate entry ({}, {})", i + 1, j + 1)));
                }
                seen[i][j] = true;
                dense[i][j] = v;
                if symmetric {
                    dense[j][i] = v;
                }
            }
        } else {
            // column-major; symmetric arrays list the lower triangle only
            #[allow(clippy::needless_range_loop)]
            for j in 0..n {
                let start = if symmetric { j } else { 0 };
                for i in start..n {
                    let line = self
                        .next_content()
                        .ok_or_else(|| self.err("array data ended early"))?;
                    let v: f64 = self.number(line)?;
                    dense[i][j] = v;
                    if symmetric {
                        dense[j][i] = v;
                    }
                }
            }
        }
        if let Some(extra) = self.next_content() {
            return Err(self.err(format!("unexpected trailing content {extra:?}")));
        }
        SymMatrix::from_rows_with_tol(&dense, SYMMETRY_REL_TOL)
    }
}

/// Writes the lower triangle (nonzeros only) in coordinate symmetric form.
pub fn write_matrix_market<W: Write>(m: &SymMatrix, mut w: W) -> std::io::Result<()> {
    let n = m.dim();
    let entries: Vec<(usize, usize, f64)> = (0..n)
        .flat_map(|j| (j..n).map(move |i| (i, j)))
        .map(|(i, j)| (i, j, m.get(i, j)))
        .filter(|&(_, _, v)| v != 0.0)
        .collect();
    writeln!(w, "%%MatrixMarket matrix coordinate real symmetric")?;
    writeln!(w, "{n} {n} {}", entries.len())?;
    for (i, j, v) in entries {
        writeln!(w, "{} {} {v:e}", i + 1, j + 1)?;
    }
    Ok(())
}

pub fn write_dense_text<W: Write>(m: &SymMatrix, mut w: W) -> std::io::Result<()> {
    let n = m.dim();
    writeln!(w, "{n}")?;
    for i in 0..n {
        let row: Vec<String> = (0..n).map(|j| format!("{:e}", m.get(i, j))).collect();
        writeln!(w, "{}", row.join(" "))?;
    }
    Ok(())
}

pub fn save_matrix(m: &SymMatrix, path: &Path, format: MatrixFormat) -> Result<()> {
    let mut buf = Vec::new();
    match format {
        MatrixFormat::DenseText => write_dense_text(m, &mut buf),
        _ => write_matrix_market(m, &mut buf),
    }
    .map_err(|e| Error::io("formatting matrix", e))?;
    fs::write(path, buf).map_err(|e| Error::io(format!("writing {}", path.display()), e))
}
