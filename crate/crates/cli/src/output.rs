use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde_json::{json, Value};
use spinlab::readout::Spectrum;
use spinlab::CMatrix;

/// Row-major matrix of `[re, im]` pairs.
pub fn matrix_json(m: &CMatrix) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|r| Value::Array((0..m.ncols()).map(|c| json!([m[(r, c)].re, m[(r, c)].im])).collect()))
            .collect(),
    )
}

pub fn matrix_from_json(v: &Value) -> Result<CMatrix, String> {
    let rows = v.as_array().ok_or("expected an array of rows")?;
    let n = rows.len();
    let mut m = CMatrix::zeros(n, n);
    for (r, row) in rows.iter().enumerate() {
        let row = row.as_array().filter(|x| x.len() == n).ok_or(format!("row {r}: expected {n} entries"))?;
        for (c, e) in row.iter().enumerate() {
            let pair = e
                .as_array()
                .filter(|p| p.len() == 2)
                .and_then(|p| Some(Complex64::new(p[0].as_f64()?, p[1].as_f64()?)))
                .ok_or(format!("entry ({r}, {c}): expected [re, im]"))?;
            m[(r, c)] = pair;
        }
    }
    Ok(m)
}

pub fn csv<I: IntoIterator<Item = (f64, Complex64)>>(rows: I) -> String {
    let mut out = String::from("x,re,im\n");
    for (x, z) in rows {
        writeln!(out, "{x},{},{}", z.re, z.im).unwrap();
    }
    out
}

pub fn spectrum_csv(s: &Spectrum) -> String {
    csv(s.freqs_hz.iter().copied().zip(s.amplitudes.iter().copied()))
}

pub fn write(dir: &Path, name: &str, contents: &str) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(name), contents)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_round_trip() {
        let m = CMatrix::from_fn(3, 3, |r, c| Complex64::new(r as f64 - 0.5, c as f64 * 1e-7));
        assert_eq!(matrix_from_json(&matrix_json(&m)).unwrap(), m);
        assert!(matrix_from_json(&json!([[1.0]])).is_err());
    }

    #[test]
    fn csv_header_and_rows() {
        let s = csv([(0.5, Complex64::new(1.0, -2.0))]);
        assert_eq!(s, "x,re,im\n0.5,1,-2\n");
    }
}
