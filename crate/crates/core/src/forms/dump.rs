//! Coordinate text format: a `% rows cols nnz` header followed by one
//! zero-based `row col value` line per stored entry.

use std::io::{self, BufRead, Write};

use nalgebra_sparse::{CooMatrix, CsrMatrix};

use crate::scalar::{lit, to_f64, Real};

pub fn write_matrix<T: Real, W: Write>(out: &mut W, m: &CsrMatrix<T>) -> io::Result<()> {
    writeln!(out, "% {} {} {}", m.nrows(), m.ncols(), m.nnz())?;
    for (i, j, v) in m.triplet_iter() {
        writeln!(out, "{i} {j} {:?}", to_f64(*v))?;
    }
    Ok(())
}

fn invalid(line: usize, message: impl Into<String>) -> io::Error {
    io::Error::new(
        io::ErrorKind::InvalidData,
        format!("line {line}: {}", message.into()),
    )
}

pub fn read_matrix<T: Real, R: BufRead>(input: R) -> io::Result<CsrMatrix<T>> {
    let mut dims: Option<(usize, usize)> = None;
    let mut triplets: Vec<(usize, usize, f64)> = Vec::new();
    for (k, line) in input.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(header) = line.strip_prefix('%') {
            let fields: Vec<usize> = header
                .split_whitespace()
                .map(|s| s.parse().map_err(|_| invalid(k + 1, "bad header")))
                .collect::<Result<_, _>>()?;
            if dims.is_none() && fields.len() >= 2 {
                dims = Some((fields[0], fields[1]));
            }
            continue;
        }
        let mut parts = line.split_whitespace();
        let mut next = || parts.next().ok_or_else(|| invalid(k + 1, "expected `row col value`"));
        let i: usize = next()?.parse().map_err(|_| invalid(k + 1, "bad row index"))?;
        let j: usize = next()?.parse().map_err(|_| invalid(k + 1, "bad column index"))?;
        let v: f64 = next()?.parse().map_err(|_| invalid(k + 1, "bad value"))?;
        triplets.push((i, j, v));
    }
    let (rows, cols) = dims.unwrap_or_else(|| {
        triplets
            .iter()
            .fold((0, 0), |(r, c), &(i, j, _)| (r.max(i + 1), c.max(j + 1)))
    });
    let mut coo = CooMatrix::new(rows, cols);
    for (i, j, v) in triplets {
        if i >= rows || j >= cols {
            return Err(invalid(0, format!("entry ({i}, {j}) outside {rows}x{cols}")));
        }
        coo.push(i, j, lit::<T>(v));
    }
    Ok(CsrMatrix::from(&coo))
}
