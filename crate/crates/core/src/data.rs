// SPDX-License-Identifier: MIT OR Apache-2.0

use crate::error::{Error, Result};

/// An observed `n x p` panel: rows are time (or locus) points, columns are
/// coordinates. Storage is row-major; every entry is finite.
#[derive(Clone, Debug, PartialEq)]
pub struct DataMatrix {
    values: Vec<f64>,
    n: usize,
    p: usize,
}

impl DataMatrix {
    /// Builds a matrix from row-major values. Rejects non-finite entries,
    /// reporting the 0-based row and column of the first offender.
    pub fn new(n: usize, p: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n * p {
            return Err(Error::DimensionMismatch {
                expected: n * p,
                actual: values.len(),
            });
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / p.max(1),
                col: pos % p.max(1),
            });
        }
        Ok(Self { values, n, p })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let p = rows.first().map_or(0, |r| r.as_ref().len());
        let mut values = Vec::with_capacity(rows.len() * p);
        for r in rows {
            let r = r.as_ref();
            if r.len() != p {
                return Err(Error::DimensionMismatch {
                    expected: p,
                    actual: r.len(),
                });
            }
            values.extend_from_slice(r);
        }
        Self::new(rows.len(), p, values)
    }

    pub fn zeros(n: usize, p: usize) -> Self {
        Self {
            values: vec![0.0; n * p],
            n,
            p,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    /// Row `i`, 0-based.
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.p..(i + 1) * self.p]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        // chunks_exact panics on zero chunk size
        self.values.chunks_exact(self.p.max(1)).take(self.n)
    }

    /// Column `l`, 0-based, copied out.
    pub fn column(&self, l: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.values[i * self.p + l]).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    /// Overall mean row.
    pub fn mean_row(&self) -> Vec<f64> {
        let mut mean = vec![0.0; self.p];
        for r in self.rows() {
            for (m, v) in mean.iter_mut().zip(r) {
                *m += v;
            }
        }
        let n = self.n.max(1) as f64;
        mean.iter_mut().for_each(|m| *m /= n);
        mean
    }

    /// Rows in reverse time order.
    pub fn reversed(&self) -> Self {
        let mut values = Vec::with_capacity(self.values.len());
        for i in (0..self.n).rev() {
            values.extend_from_slice(self.row(i));
        }
        Self {
            values,
            n: self.n,
            p: self.p,
        }
    }

    /// Adds `shift` to every row.
    pub fn shifted(&self, shift: &[f64]) -> Result<Self> {
        if shift.len() != self.p {
            return Err(Error::DimensionMismatch {
                expected: self.p,
                actual: shift.len(),
            });
        }
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(k, v)| v + shift[k % self.p])
            .collect();
        Self::new(self.n, self.p, values)
    }

    /// Rows `start..end` (0-based, half open) as a new matrix.
    pub fn slice_rows(&self, start: usize, end: usize) -> Self {
        Self {
            values: self.values[start * self.p..end * self.p].to_vec(),
            n: end - start,
            p: self.p,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite_with_location() {
        let err = DataMatrix::new(2, 3, vec![0.0, 1.0, 2.0, 3.0, f64::NAN, 5.0]).unwrap_err();
        match err {
            Error::NonFinite { row, col } => assert_eq!((row, col), (1, 1)),
            other => panic!("unexpected error {other:?}"),
        }
        assert!(DataMatrix::new(1, 2, vec![f64::INFINITY, 0.0]).is_err());
    }

    #[test]
    fn ragged_rows_rejected() {
        let rows: Vec<Vec<f64>> = vec![vec![1.0, 2.0], vec![3.0]];
        assert!(DataMatrix::from_rows(&rows).is_err());
    }

    #[test]
    fn reversal_and_mean() {
        let x = DataMatrix::from_rows(&[[1.0, 2.0], [3.0, 4.0], [5.0, 9.0]]).unwrap();
        assert_eq!(x.reversed().row(0), &[5.0, 9.0]);
        assert_eq!(x.mean_row(), vec![3.0, 5.0]);
        assert_eq!(x.column(1), vec![2.0, 4.0, 9.0]);
    }
}
