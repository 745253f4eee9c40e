//! Plain-text file formats.
//!
//! Instance format (line oriented, whitespace separated):
//!
//! ```text
//! m n nnz
//! b_0 b_1 ... b_{m-1}
//! c_0 c_1 ... c_{n-1}
//! i j a_ij        (nnz lines, 0-based indices)
//! ```
//!
//! Solution files carry one value per line (`n` lines). Dual files carry
//! `phi` then `psi`: `m` lines followed by one line per variable of the LP
//! that was solved. All reals are serialized with 17 significant digits
//! (`{:.16e}`), which round-trips every f64 bit-exactly.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use packlp_core::{DualSolution, LpError, PackingLp};

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{path}:{line}: {msg}")]
    Parse { path: String, line: usize, msg: String },
    #[error("{path}: {source}")]
    Validation {
        path: String,
        #[source]
        source: LpError,
    },
}

/// 17 significant digits; parses back to the identical double.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_instance(lp: &PackingLp, path: &Path) -> Result<(), IoError> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{} {} {}", lp.m(), lp.n(), lp.nnz())?;
    write_row(&mut w, lp.b())?;
    write_row(&mut w, lp.c())?;
    for j in 0..lp.n() {
        let (rows, vals) = lp.col(j);
        for (&i, &a) in rows.iter().zip(vals) {
            writeln!(w, "{} {} {}", i, j, fmt_f64(a))?;
        }
    }
    w.flush()?;
    Ok(())
}

fn write_row(w: &mut impl Write, vals: &[f64]) -> std::io::Result<()> {
    let mut first = true;
    for &v in vals {
        if !first {
            write!(w, " ")?;
        }
        write!(w, "{}", fmt_f64(v))?;
        first = false;
    }
    writeln!(w)
}

struct LineParser {
    path: String,
    line_no: usize,
}

impl LineParser {
    fn err(&self, msg: impl Into<String>) -> IoError {
        IoError::Parse { path: self.path.clone(), line: self.line_no, msg: msg.into() }
    }

    fn parse<T: std::str::FromStr>(&self, tok: &str, what: &str) -> Result<T, IoError> {
        tok.parse().map_err(|_| self.err(format!("cannot parse {what} from {tok:?}")))
    }
}

pub fn read_instance(path: &Path) -> Result<PackingLp, IoError> {
    let reader = BufReader::new(File::open(path)?);
    let mut lines = reader.lines();
    let mut p = LineParser { path: path.display().to_string(), line_no: 0 };

    let mut next_line = |p: &mut LineParser| -> Result<String, IoError> {
        loop {
            p.line_no += 1;
            match lines.next() {
                Some(line) => {
                    let line = line?;
                    if !line.trim().is_empty() {
                        return Ok(line);
                    }
                }
                None => return Err(p.err("unexpected end of file")),
            }
        }
    };

    let header = next_line(&mut p)?;
    let head: Vec<&str> = header.split_whitespace().collect();
    if head.len() != 3 {
        return Err(p.err("header must be `m n nnz`"));
    }
    let m: usize = p.parse(head[0], "m")?;
    let n: usize = p.parse(head[1], "n")?;
    let nnz: usize = p.parse(head[2], "nnz")?;

    let b_line = next_line(&mut p)?;
    let b = parse_row(&p, &b_line, m, "b")?;
    let c_line = next_line(&mut p)?;
    let c = parse_row(&p, &c_line, n, "c")?;

    let mut entries = Vec::with_capacity(nnz);
    for _ in 0..nnz {
        let line = next_line(&mut p)?;
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 3 {
            return Err(p.err("entry must be `i j a_ij`"));
        }
        let i: usize = p.parse(toks[0], "row index")?;
        let j: usize = p.parse(toks[1], "column index")?;
        let a: f64 = p.parse(toks[2], "coefficient")?;
        entries.push((i, j, a));
    }

    PackingLp::from_entries(m, n, &entries, b, c)
        .map_err(|source| IoError::Validation { path: p.path.clone(), source })
}

fn parse_row(p: &LineParser, line: &str, expect: usize, what: &str) -> Result<Vec<f64>, IoError> {
    let vals: Result<Vec<f64>, IoError> =
        line.split_whitespace().map(|tok| p.parse(tok, what)).collect();
    let vals = vals?;
    if vals.len() != expect {
        return Err(p.err(format!("{what} has {} values, expected {expect}", vals.len())));
    }
    Ok(vals)
}

/// One value per line.
pub fn write_solution(x: &[f64], path: &Path) -> Result<(), IoError> {
    let mut w = BufWriter::new(File::create(path)?);
    for &v in x {
        writeln!(w, "{}", fmt_f64(v))?;
    }
    w.flush()?;
    Ok(())
}

/// Reads one value per line; `expected_len`, when given, is enforced.
pub fn read_solution(path: &Path, expected_len: Option<usize>) -> Result<Vec<f64>, IoError> {
    let reader = BufReader::new(File::open(path)?);
    let mut p = LineParser { path: path.display().to_string(), line_no: 0 };
    let mut vals = Vec::new();
    for line in reader.lines() {
        p.line_no += 1;
        let line = line?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        vals.push(p.parse::<f64>(t, "value")?);
    }
    if let Some(expect) = expected_len {
        if vals.len() != expect {
            return Err(p.err(format!("solution has {} values, expected {expect}", vals.len())));
        }
    }
    Ok(vals)
}

/// Writes `phi` then `psi`, one value per line.
pub fn write_duals(dual: &DualSolution, path: &Path) -> Result<(), IoError> {
    let mut w = BufWriter::new(File::create(path)?);
    for &v in dual.phi.iter().chain(&dual.psi) {
        writeln!(w, "{}", fmt_f64(v))?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a dual file for an LP with `m` rows: the first `m` values are
/// `phi`, the rest `psi`.
pub fn read_duals(path: &Path, m: usize) -> Result<DualSolution, IoError> {
    let vals = read_solution(path, None)?;
    if vals.len() < m {
        return Err(IoError::Parse {
            path: path.display().to_string(),
            line: vals.len(),
            msg: format!("dual file has {} values, needs at least m = {m}", vals.len()),
        });
    }
    let (phi, psi) = vals.split_at(m);
    Ok(DualSolution { phi: phi.to_vec(), psi: psi.to_vec() })
}
