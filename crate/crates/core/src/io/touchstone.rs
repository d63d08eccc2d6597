//! Touchstone v1 export/import of a single-frequency S-matrix.
//!
//! Header: `# Hz S RI R <z0>`. Data are real/imaginary pairs in row-major
//! matrix order at every port count, at most four pairs per line, and each
//! matrix row starts a new line. Row-major order is used even for 2-port
//! files, diverging from the v1 convention that puts S21 before S12;
//! readers of our own files get the documented order.

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use num_complex::Complex64;
use std::io::{BufRead, Write};
use std::path::Path;

#[derive(Clone, Debug)]
pub struct TouchstoneData {
    pub frequency_hz: f64,
    pub z0: f64,
    pub s: CMatrix,
}

pub fn write_touchstone_to<W: Write>(w: &mut W, data: &TouchstoneData) -> Result<()> {
    let n = data.s.nrows();
    if n != data.s.ncols() {
        return Err(Error::DimensionMismatch {
            context: "touchstone export requires a square matrix",
            expected: n,
            got: data.s.ncols(),
        });
    }
    writeln!(
        w,
        "! {n}-port single-frequency S-parameters, row-major order"
    )?;
    writeln!(w, "# Hz S RI R {}", data.z0)?;
    for i in 0..n {
        let mut line = if i == 0 {
            format!("{:e}", data.frequency_hz)
        } else {
            String::new()
        };
        for j in 0..n {
            let v = data.s[(i, j)];
            if j > 0 && j % 4 == 0 {
                writeln!(w, "{line}")?;
                line = String::new();
            }
            if !line.is_empty() {
                line.push(' ');
            }
            line.push_str(&format!("{:e} {:e}", v.re, v.im));
        }
        writeln!(w, "{line}")?;
    }
    Ok(())
}

pub fn write_touchstone(path: &Path, data: &TouchstoneData) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_touchstone_to(&mut f, data)
}

pub fn read_touchstone_from<R: BufRead>(r: R) -> Result<TouchstoneData> {
    let mut z0 = None;
    let mut values: Vec<f64> = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        let row_no = i + 1;
        let content = match line.find('!') {
            Some(pos) => &line[..pos],
            None => &line[..],
        };
        let content = content.trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix('#') {
            let tokens: Vec<String> = rest.split_whitespace().map(str::to_lowercase).collect();
            if tokens.len() < 5
                || tokens[0] != "hz"
                || tokens[1] != "s"
                || tokens[2] != "ri"
                || tokens[3] != "r"
            {
                return Err(Error::Parse {
                    row: row_no,
                    col: 1,
                    message: format!(
                        "unsupported option line '#{rest}'; expected '# Hz S RI R <z0>'"
                    ),
                });
            }
            let z: f64 = tokens[4].parse().map_err(|_| Error::Parse {
                row: row_no,
                col: 5,
                message: format!("bad reference impedance '{}'", tokens[4]),
            })?;
            z0 = Some(z);
            continue;
        }
        for (j, token) in content.split_whitespace().enumerate() {
            let v: f64 = token.parse().map_err(|_| Error::Parse {
                row: row_no,
                col: j + 1,
                message: format!("bad number '{token}'"),
            })?;
            values.push(v);
        }
    }
    let z0 = z0.ok_or(Error::Parse {
        row: 1,
        col: 1,
        message: "missing '#' option line".into(),
    })?;
    if values.len() < 3 {
        return Err(Error::Parse {
            row: 1,
            col: 1,
            message: "no data values".into(),
        });
    }
    let frequency_hz = values[0];
    let rest = &values[1..];
    let n_f = ((rest.len() / 2) as f64).sqrt().round() as usize;
    if 2 * n_f * n_f != rest.len() {
        return Err(Error::Parse {
            row: 1,
            col: 1,
            message: format!(
                "{} data values do not form one square matrix of pairs",
                rest.len()
            ),
        });
    }
    let s = CMatrix::from_fn(n_f, n_f, |i, j| {
        let k = 2 * (i * n_f + j);
        Complex64::new(rest[k], rest[k + 1])
    });
    Ok(TouchstoneData {
        frequency_hz,
        z0,
        s,
    })
}

pub fn read_touchstone(path: &Path) -> Result<TouchstoneData> {
    read_touchstone_from(std::io::BufReader::new(std::fs::File::open(path)?))
}
