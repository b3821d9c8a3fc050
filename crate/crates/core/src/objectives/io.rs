//! Binary PGM (P5, 8-bit) images and numeric CSV files.
//!
//! Image vectors are column-major stacks (`col * N + row`); files are written
//! row-major as the formats expect.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Writes a square image stack as P5. Values are clamped to `[lo, hi]` and
/// mapped linearly to `0..=255`.
pub fn write_pgm<W: Write>(
    mut out: W,
    side: usize,
    u: &DVector<f64>,
    lo: f64,
    hi: f64,
) -> Result<()> {
    Error::check_len(side * side, u.len())?;
    write!(out, "P5\n{side} {side}\n255\n")?;
    let span = if hi > lo { hi - lo } else { 1.0 };
    let mut bytes = Vec::with_capacity(side * side);
    for row in 0..side {
        for col in 0..side {
            let v = ((u[col * side + row] - lo) / span).clamp(0.0, 1.0);
            bytes.push((v * 255.0).round() as u8);
        }
    }
    out.write_all(&bytes)?;
    Ok(())
}

pub fn save_pgm(path: &Path, side: usize, u: &DVector<f64>, lo: f64, hi: f64) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_pgm(std::io::BufWriter::new(file), side, u, lo, hi)
}

/// Reads a P5 image with maxval <= 255 into a column-major stack scaled to `[0, 1]`.
/// Returns `(width, height, stack)`.
pub fn read_pgm<R: Read>(input: R) -> Result<(usize, usize, DVector<f64>)> {
    let mut reader = BufReader::new(input);
    let mut header = Vec::new();
    while header.len() < 4 {
        let mut line = String::new();
        if reader.read_line(&mut line)? == 0 {
            return Err(Error::Parse("PGM header truncated".into()));
        }
        let content = line.split('#').next().unwrap_or("");
        header.extend(content.split_whitespace().map(str::to_owned));
    }
    if header[0] != "P5" {
        return Err(Error::Parse(format!("unsupported PGM magic {}", header[0])));
    }
    let parse = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| Error::Parse(format!("PGM header field {s}")))
    };
    let (width, height, maxval) = (parse(&header[1])?, parse(&header[2])?, parse(&header[3])?);
    if maxval == 0 || maxval > 255 {
        return Err(Error::Parse(format!("PGM maxval {maxval} not supported")));
    }
    let mut bytes = vec![0u8; width * height];
    reader.read_exact(&mut bytes)?;
    let mut u = DVector::zeros(width * height);
    for row in 0..height {
        for col in 0..width {
            u[col * height + row] = bytes[row * width + col] as f64 / maxval as f64;
        }
    }
    Ok((width, height, u))
}

/// Reads a numeric CSV (no header) into a dense matrix.
pub fn read_matrix_csv<R: Read>(input: R) -> Result<DMatrix<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in BufReader::new(input).lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let row = trimmed
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("line {}: bad number {t:?}", lineno + 1)))
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(Error::Parse(format!("line {}: ragged row", lineno + 1)));
            }
        }
        rows.push(row);
    }
    let ncols = rows.first().map_or(0, Vec::len);
    Ok(DMatrix::from_row_iterator(
        rows.len(),
        ncols,
        rows.into_iter().flatten(),
    ))
}

/// Reads a vector stored either as one column or one row.
pub fn read_vector_csv<R: Read>(input: R) -> Result<DVector<f64>> {
    let m = read_matrix_csv(input)?;
    if m.ncols() == 1 || m.nrows() == 1 {
        Ok(DVector::from_iterator(m.len(), m.iter().copied()))
    } else {
        Err(Error::Parse(format!(
            "expected a vector, found a {}x{} matrix",
            m.nrows(),
            m.ncols()
        )))
    }
}

pub fn write_matrix_csv<W: Write>(mut out: W, m: &DMatrix<f64>) -> Result<()> {
    for row in m.row_iter() {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
        writeln!(out, "{}", cells.join(","))?;
    }
    Ok(())
}

/// One value per line.
pub fn write_vector_csv<W: Write>(mut out: W, v: &DVector<f64>) -> Result<()> {
    for x in v.iter() {
        writeln!(out, "{x:e}")?;
    }
    Ok(())
}
