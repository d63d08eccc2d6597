//! Complex-matrix interchange as CSV. One matrix row per line, entries
//! comma-separated, each entry a `re+imj` / `re-imj` token. Chosen over a
//! binary format for inspectability; values print in shortest round-trip
//! form so write/read is lossless.

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use num_complex::Complex64;
use std::io::{BufRead, Write};
use std::path::Path;

/// Render one complex entry as `re+imj` or `re-imj`.
pub fn format_complex(v: Complex64) -> String {
    if v.im.is_sign_negative() {
        format!("{}-{}j", v.re, -v.im)
    } else {
        format!("{}+{}j", v.re, v.im)
    }
}

/// Parse a `re±imj` token. `row`/`col` are 1-based positions used in
/// diagnostics only.
pub fn parse_complex(token: &str, row: usize, col: usize) -> Result<Complex64> {
    let t = token.trim();
    let err = |message: String| Error::Parse { row, col, message };
    let body = t
        .strip_suffix('j')
        .ok_or_else(|| err(format!("expected trailing 'j' in '{t}'")))?;
    // split at the last sign that is not an exponent sign
    let bytes = body.as_bytes();
    let mut split = None;
    for i in (1..bytes.len()).rev() {
        let c = bytes[i];
        if (c == b'+' || c == b'-') && !matches!(bytes[i - 1], b'e' | b'E') {
            split = Some(i);
            break;
        }
    }
    let split = split.ok_or_else(|| err(format!("no real/imaginary separator in '{t}'")))?;
    let re: f64 = body[..split]
        .parse()
        .map_err(|_| err(format!("bad real part in '{t}'")))?;
    let im: f64 = body[split..]
        .parse()
        .map_err(|_| err(format!("bad imaginary part in '{t}'")))?;
    Ok(Complex64::new(re, im))
}

pub fn write_matrix_to<W: Write>(w: &mut W, m: &CMatrix) -> Result<()> {
    for i in 0..m.nrows() {
        let line: Vec<String> = (0..m.ncols()).map(|j| format_complex(m[(i, j)])).collect();
        writeln!(w, "{}", line.join(","))?;
    }
    Ok(())
}

pub fn write_matrix(path: &Path, m: &CMatrix) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_matrix_to(&mut f, m)
}

pub fn read_matrix_from<R: BufRead>(r: R) -> Result<CMatrix> {
    let mut rows: Vec<Vec<Complex64>> = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let row_no = i + 1;
        let mut row = Vec::new();
        for (j, token) in line.split(',').enumerate() {
            row.push(parse_complex(token, row_no, j + 1)?);
        }
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(Error::Parse {
                    row: row_no,
                    col: row.len(),
                    message: format!(
                        "ragged row: {} entries, expected {}",
                        row.len(),
                        first.len()
                    ),
                });
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse {
            row: 1,
            col: 1,
            message: "empty matrix file".into(),
        });
    }
    let (nr, nc) = (rows.len(), rows[0].len());
    Ok(CMatrix::from_fn(nr, nc, |i, j| rows[i][j]))
}

pub fn read_matrix(path: &Path) -> Result<CMatrix> {
    read_matrix_from(std::io::BufReader::new(std::fs::File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    #[test]
    fn token_round_trip() {
        let cases = [
            Complex64::new(1.5, 2.25),
            Complex64::new(-3.0, -0.5),
            Complex64::new(0.0, 0.0),
            Complex64::new(1.5e-3, -2e10),
            Complex64::new(-1.0, 7.0),
        ];
        for v in cases {
            let token = format_complex(v);
            let back = parse_complex(&token, 1, 1).unwrap();
            assert_eq!(back, v, "token {token}");
        }
        assert_eq!(format_complex(Complex64::new(1.0, -2.0)), "1-2j");
        assert_eq!(format_complex(Complex64::new(1.0, 2.0)), "1+2j");
    }

    #[test]
    fn exponent_signs_are_not_separators() {
        let v = parse_complex("1.5e-3+2e+1j", 1, 1).unwrap();
        assert_eq!(v, Complex64::new(1.5e-3, 20.0));
        let v = parse_complex("-1e-2-3e-4j", 1, 1).unwrap();
        assert_eq!(v, Complex64::new(-0.01, -3e-4));
    }

    #[test]
    fn malformed_tokens_name_position() {
        for bad in ["1+2", "nope", "1.0", "1..0+2j", "1+two j"] {
            match parse_complex(bad, 3, 7) {
                Err(Error::Parse { row: 3, col: 7, .. }) => {}
                other => panic!("expected parse error for '{bad}', got {other:?}"),
            }
        }
    }

    #[test]
    fn matrix_round_trip_is_lossless() {
        let mut rng = StdRng::seed_from_u64(15);
        let m = CMatrix::from_fn(5, 3, |_, _| {
            Complex64::new(rng.gen_range(-1e3..1e3), rng.gen_range(-1e-6..1e-6))
        });
        let mut buf = Vec::new();
        write_matrix_to(&mut buf, &m).unwrap();
        let back = read_matrix_from(std::io::Cursor::new(buf)).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn ragged_rows_rejected() {
        let text = "1+0j,2+0j\n3+0j\n";
        match read_matrix_from(std::io::Cursor::new(text)) {
            Err(Error::Parse { row: 2, .. }) => {}
            other => panic!("expected ragged-row error, got {other:?}"),
        }
    }
}
