//! Matrix text format shared by the library and the CLI.
//!
//! First line: `n k`. Then `n` lines of `k` whitespace-separated complex
//! entries, each written as `re` or `re+imi` / `re-imi` (e.g. `1.5-0.25i`).
//! Values are parsed at full double precision; errors carry 1-based line
//! numbers.

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::scalar::{Cx, Scalar};

/// Parses one complex entry token.
pub fn parse_complex<S: Scalar>(token: &str) -> Option<Cx<S>> {
    let token = token.trim();
    if token.is_empty() {
        return None;
    }
    if let Some(body) = token.strip_suffix(['i', 'I']) {
        // Split at the sign separating real and imaginary parts: the last
        // '+'/'-' that is neither leading nor an exponent sign.
        let bytes = body.as_bytes();
        let mut split = None;
        for pos in (1..bytes.len()).rev() {
            let b = bytes[pos];
            if (b == b'+' || b == b'-') && !matches!(bytes[pos - 1], b'e' | b'E') {
                split = Some(pos);
                break;
            }
        }
        let pos = split?;
        let re: f64 = body[..pos].parse().ok()?;
        let sign = if bytes[pos] == b'-' { -1.0 } else { 1.0 };
        let im_str = &body[pos + 1..];
        if im_str.is_empty() || im_str.starts_with(['+', '-']) {
            return None;
        }
        let im: f64 = im_str.parse().ok()?;
        if !re.is_finite() || !im.is_finite() {
            return None;
        }
        Some(Cx::new(S::real(re), S::real(sign * im)))
    } else {
        let re: f64 = token.parse().ok()?;
        if !re.is_finite() {
            return None;
        }
        Some(Cx::new(S::real(re), S::zero()))
    }
}

/// Formats one complex entry in the file format (round-trip decimal).
pub fn format_complex<S: Scalar>(z: Cx<S>) -> String {
    if z.im == S::zero() {
        format!("{}", z.re)
    } else if z.im < S::zero() {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

/// Parses a full matrix file.
pub fn parse_matrix<S: Scalar>(text: &str) -> Result<ComplexMatrix<S>> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Parse {
            line: 1,
            message: "empty file, expected header 'n k'".into(),
        })?;
    let dims: Vec<&str> = header.split_whitespace().collect();
    if dims.len() != 2 {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header 'n k', got '{}'", header.trim()),
        });
    }
    let rows: usize = dims[0].parse().map_err(|_| Error::Parse {
        line: 1,
        message: format!("bad row count '{}'", dims[0]),
    })?;
    let cols: usize = dims[1].parse().map_err(|_| Error::Parse {
        line: 1,
        message: format!("bad column count '{}'", dims[1]),
    })?;
    if rows == 0 || cols == 0 {
        return Err(Error::Parse {
            line: 1,
            message: "matrix must be at least 1x1".into(),
        });
    }

    let mut data: Vec<Cx<S>> = Vec::with_capacity(rows * cols);
    let mut filled = 0usize;
    for (idx, line) in lines {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        if filled == rows {
            return Err(Error::Parse {
                line: lineno,
                message: format!("expected {} data rows, found extra content", rows),
            });
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != cols {
            return Err(Error::Parse {
                line: lineno,
                message: format!("expected {} entries, got {}", cols, tokens.len()),
            });
        }
        for tok in tokens {
            let z = parse_complex::<S>(tok).ok_or_else(|| Error::Parse {
                line: lineno,
                message: format!("bad complex entry '{}'", tok),
            })?;
            data.push(z);
        }
        filled += 1;
    }
    if filled != rows {
        return Err(Error::Parse {
            line: text.lines().count(),
            message: format!("expected {} data rows, got {}", rows, filled),
        });
    }
    ComplexMatrix::from_vec(rows, cols, data)
}

/// Writes a matrix in the file format.
pub fn format_matrix<S: Scalar>(m: &ComplexMatrix<S>) -> String {
    let mut out = format!("{} {}\n", m.rows(), m.cols());
    for i in 0..m.rows() {
        let row: Vec<String> = (0..m.cols()).map(|j| format_complex(m[(i, j)])).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;

    #[test]
    fn parses_entry_forms() {
        assert_eq!(parse_complex::<f64>("1.5"), Some(cx(1.5, 0.0)));
        assert_eq!(parse_complex::<f64>("1.5-0.25i"), Some(cx(1.5, -0.25)));
        assert_eq!(parse_complex::<f64>("0+2i"), Some(cx(0.0, 2.0)));
        assert_eq!(parse_complex::<f64>("-3e-2+4.5e+1i"), Some(cx(-0.03, 45.0)));
        assert_eq!(parse_complex::<f64>("1e-3"), Some(cx(1e-3, 0.0)));
        // Out of format: bare imaginary, missing parts, stray signs.
        assert_eq!(parse_complex::<f64>("2i"), None);
        assert_eq!(parse_complex::<f64>("i"), None);
        assert_eq!(parse_complex::<f64>("1.5+"), None);
        assert_eq!(parse_complex::<f64>("1.5+-2i"), None);
        assert_eq!(parse_complex::<f64>("nan"), None);
    }

    #[test]
    fn parse_reports_line_numbers() {
        let bad = "2 2\n1 0\n1 oops";
        match parse_matrix::<f64>(bad) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {:?}", other),
        }
        let short = "3 1\n1\n2\n";
        assert!(matches!(
            parse_matrix::<f64>(short),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn roundtrip() {
        let m = ComplexMatrix::from_rows(&[
            vec![cx(1.5, -0.25), cx(0.0, 0.0)],
            vec![cx(-2.0, 1.0), cx(0.125, 3.5e-9)],
        ])
        .unwrap();
        let text = format_matrix(&m);
        let back = parse_matrix::<f64>(&text).unwrap();
        assert_eq!(m, back);
    }
}
