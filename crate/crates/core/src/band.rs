//! Compact storage for banded square matrices.
//!
//! Row `i` keeps the entries for columns `i - lower ..= i + upper`; everything
//! outside that window is an implicit zero.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct BandMatrix {
    dim: usize,
    lower: usize,
    upper: usize,
    data: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(dim: usize, lower: usize, upper: usize) -> Self {
        Self {
            dim,
            lower,
            upper,
            data: vec![0.0; dim * (lower + upper + 1)],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, 0, 0);
        for i in 0..dim {
            m.set(i, i, 1.0);
        }
        m
    }

    /// Full-band copy of a dense row-major matrix.
    pub fn from_dense(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::Dimension("dense matrix is not square".into()));
        }
        let band = dim.saturating_sub(1);
        let mut m = Self::zeros(dim, band, band);
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lower(&self) -> usize {
        self.lower
    }

    pub fn upper(&self) -> usize {
        self.upper
    }

    fn width(&self) -> usize {
        self.lower + self.upper + 1
    }

    pub fn in_band(&self, i: usize, j: usize) -> bool {
        i < self.dim && j < self.dim && j + self.lower >= i && j <= i + self.upper
    }

    /// Column range `lo..hi` of the stored window of row `i`.
    pub fn row_span(&self, i: usize) -> (usize, usize) {
        let lo = i.saturating_sub(self.lower);
        let hi = (i + self.upper + 1).min(self.dim);
        (lo, hi)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if self.in_band(i, j) {
            self.data[i * self.width() + j + self.lower - i]
        } else {
            0.0
        }
    }

    /// Panics if `(i, j)` lies outside the band.
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        assert!(
            self.in_band(i, j),
            "({i}, {j}) outside band (lower {}, upper {})",
            self.lower,
            self.upper
        );
        let w = self.width();
        self.data[i * w + j + self.lower - i] = value;
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        (0..self.dim).map(|j| self.get(i, j)).collect()
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        (0..self.dim).map(|i| self.row(i)).collect()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.dim)
            .map(|i| {
                let (lo, hi) = self.row_span(i);
                (lo..hi).map(|j| self.get(i, j) * x[j]).sum()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn get_outside_band_is_zero() {
        let mut m = BandMatrix::zeros(5, 1, 2);
        m.set(2, 4, 3.0);
        m.set(2, 1, -1.0);
        assert_eq!(m.get(2, 4), 3.0);
        assert_eq!(m.get(2, 1), -1.0);
        assert_eq!(m.get(2, 0), 0.0);
        assert_eq!(m.get(0, 3), 0.0);
        assert_eq!(m.row_span(0), (0, 3));
        assert_eq!(m.row_span(4), (3, 5));
    }

    #[test]
    #[should_panic]
    fn set_outside_band_panics() {
        BandMatrix::zeros(4, 1, 1).set(0, 2, 1.0);
    }

    #[test]
    fn dense_round_trip_and_product() {
        let rows = vec![
            vec![1.0, 2.0, 0.0],
            vec![0.0, 3.0, 4.0],
            vec![5.0, 0.0, 6.0],
        ];
        let m = BandMatrix::from_dense(&rows).unwrap();
        assert_eq!(m.to_dense(), rows);
        assert_eq!(m.mul_vec(&[1.0, 1.0, 1.0]), vec![3.0, 7.0, 11.0]);
    }
}
