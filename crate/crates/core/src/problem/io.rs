//! Plain-text problem files.
//!
//! ```text
//! # comment
//! m n
//! a11 a12 ... a1n      (m rows of A)
//! ...
//! b1 ... bm
//! c1 ... cn
//! ```

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};

use super::LoProblem;

/// Reads and validates a problem file.
pub fn load_problem(path: impl AsRef<Path>) -> Result<LoProblem> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_problem(&text)
}

/// Writes `p` so that [`load_problem`] reproduces it bit for bit.
pub fn save_problem(path: impl AsRef<Path>, p: &LoProblem) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, write_problem(p)).map_err(|e| Error::io(path, e))
}

/// Serializes a problem. `f64`'s `Display` is the shortest representation
/// that parses back to the same bits.
pub fn write_problem(p: &LoProblem) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", p.m(), p.n());
    let join = |it: &mut dyn Iterator<Item = f64>| {
        it.map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
    };
    for i in 0..p.m() {
        let _ = writeln!(out, "{}", join(&mut p.a().row(i).iter().copied()));
    }
    let _ = writeln!(out, "{}", join(&mut p.b().iter().copied()));
    let _ = writeln!(out, "{}", join(&mut p.c().iter().copied()));
    out
}

/// Parses problem text. Line numbers in errors are 1-based physical lines.
pub fn parse_problem(text: &str) -> Result<LoProblem> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (hline, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "empty file; expected header `m n`".into(),
    })?;
    let dims = parse_reals_as::<usize>(hline, header)?;
    let [m, n] = dims[..] else {
        return Err(Error::Parse {
            line: hline,
            message: format!("header must contain exactly two integers, found {}", dims.len()),
        });
    };
    if m > n {
        return Err(Error::Validation(format!("A is {m}x{n}; need m <= n")));
    }

    let mut next_row = |what: &str, len: usize| -> Result<Vec<f64>> {
        let (line, content) = lines.next().ok_or(Error::Parse {
            line: text.lines().count() + 1,
            message: format!("unexpected end of file; expected {what}"),
        })?;
        let row = parse_reals_as::<f64>(line, content)?;
        if row.len() != len {
            return Err(Error::Parse {
                line,
                message: format!("{what} has {} entries, expected {len}", row.len()),
            });
        }
        Ok(row)
    };

    let mut entries = Vec::with_capacity(m * n);
    for i in 0..m {
        entries.extend(next_row(&format!("row {} of A", i + 1), n)?);
    }
    let b = next_row("b", m)?;
    let c = next_row("c", n)?;
    if let Some((line, _)) = lines.next() {
        return Err(Error::Parse {
            line,
            message: "trailing data after c".into(),
        });
    }

    LoProblem::new(
        Matrix::from_row_slice(m, n, &entries),
        Vector::from_vec(b),
        Vector::from_vec(c),
    )
}

fn parse_reals_as<T: std::str::FromStr>(line: usize, content: &str) -> Result<Vec<T>> {
    content
        .split_whitespace()
        .map(|tok| {
            tok.parse::<T>().map_err(|_| Error::Parse {
                line,
                message: format!("cannot parse `{tok}`"),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::generate_random_lo;

    #[test]
    fn round_trip_is_bit_identical() {
        let g = generate_random_lo(4, 9, 7).unwrap();
        let text = write_problem(&g.problem);
        let back = parse_problem(&text).unwrap();
        assert_eq!(back, g.problem);

        // non-integral data too
        let p = LoProblem::new(
            Matrix::from_row_slice(1, 3, &[0.1, 1.0 / 3.0, -2.5e-17]),
            Vector::from_vec(vec![std::f64::consts::PI]),
            Vector::from_vec(vec![1e300, -0.0, 7.0]),
        )
        .unwrap();
        let back = parse_problem(&write_problem(&p)).unwrap();
        for (u, v) in back.c().iter().zip(p.c().iter()) {
            assert_eq!(u.to_bits(), v.to_bits());
        }
        assert_eq!(back, p);
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.txt");
        let g = generate_random_lo(3, 5, 1).unwrap();
        save_problem(&path, &g.problem).unwrap();
        assert_eq!(load_problem(&path).unwrap(), g.problem);
    }

    #[test]
    fn malformed_header_names_line_one() {
        let err = parse_problem("two three\n1 1\n1\n1 1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }), "{err}");
        let err = parse_problem("1 2 3\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn m_greater_than_n_is_rejected() {
        let err = parse_problem("2 1\n1\n1\n1 1\n1\n").unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = "# tiny\n\n1 2   # header\n1 1\n# b\n2\n1 1\n";
        let p = parse_problem(text).unwrap();
        assert_eq!(p.b()[0], 2.0);
        let err = parse_problem("# c\n1 2\n1 x\n2\n1 1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
        let err = parse_problem("1 2\n1 1 1\n2\n1 1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }
}
