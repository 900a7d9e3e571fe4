//! Row-major dense matrix of `f64`, the carrier type for every kernel here.
//!
//! Construction through the public constructors validates shape and rejects
//! non-finite entries, so downstream code can assume finite data. Arithmetic
//! helpers panic on shape mismatch (programming error); the public operations
//! in the other modules validate caller-facing shapes with typed errors first.

use std::ops::{Index, IndexMut};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    /// Builds an `rows x cols` matrix from row-major data.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows * cols != data.len() {
            return Err(Error::InvalidDimension(format!(
                "{}x{} needs {} entries, got {}",
                rows,
                cols,
                rows * cols,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFiniteInput(format!(
                "entry ({}, {}) is {}",
                pos / cols.max(1),
                pos % cols.max(1),
                data[pos]
            )));
        }
        Ok(Self { rows, cols, data })
    }

    /// Internal constructor for data produced by the kernels themselves.
    pub(crate) fn from_raw(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(rows * cols, data.len());
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::InvalidDimension("ragged row lengths".into()));
        }
        Self::new(r, c, rows.concat())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_raw(rows, cols, vec![0.0; rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        Self::eye(n, n)
    }

    /// Rectangular identity: ones on the main diagonal, zeros elsewhere.
    pub fn eye(rows: usize, cols: usize) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows.min(cols) {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn diag(values: &[f64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub(crate) fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_col(&mut self, j: usize, v: &[f64]) {
        assert_eq!(v.len(), self.rows);
        for i in 0..self.rows {
            self[(i, j)] = v[i];
        }
    }

    pub fn t(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    /// Matrix product; inner dimensions must agree.
    pub fn dot(&self, b: &Matrix) -> Matrix {
        assert_eq!(
            self.cols, b.rows,
            "inner dimensions {}x{} * {}x{}",
            self.rows, self.cols, b.rows, b.cols
        );
        let mut out = vec![0.0; self.rows * b.cols];
        for i in 0..self.rows {
            let arow = self.row(i);
            let orow = &mut out[i * b.cols..(i + 1) * b.cols];
            for (k, &aik) in arow.iter().enumerate() {
                if aik != 0.0 {
                    let brow = b.row(k);
                    for (o, &bkj) in orow.iter_mut().zip(brow) {
                        *o += aik * bkj;
                    }
                }
            }
        }
        Matrix::from_raw(self.rows, b.cols, out)
    }

    /// Matrix-vector product.
    pub fn dot_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn add(&self, b: &Matrix) -> Matrix {
        assert_eq!(self.shape(), b.shape());
        let data = self.data.iter().zip(&b.data).map(|(x, y)| x + y).collect();
        Matrix::from_raw(self.rows, self.cols, data)
    }

    pub fn sub(&self, b: &Matrix) -> Matrix {
        assert_eq!(self.shape(), b.shape());
        let data = self.data.iter().zip(&b.data).map(|(x, y)| x - y).collect();
        Matrix::from_raw(self.rows, self.cols, data)
    }

    pub fn scale(&self, c: f64) -> Matrix {
        Matrix::from_raw(self.rows, self.cols, self.data.iter().map(|x| x * c).collect())
    }

    pub fn norm_fro(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    /// Copy of the columns listed in `idx`, in that order.
    pub fn select_cols(&self, idx: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(self.rows, idx.len());
        for (jo, &ji) in idx.iter().enumerate() {
            assert!(ji < self.cols);
            for i in 0..self.rows {
                out[(i, jo)] = self[(i, ji)];
            }
        }
        out
    }

    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(idx.len(), self.cols);
        for (io, &ii) in idx.iter().enumerate() {
            assert!(ii < self.rows);
            out.row_mut(io).copy_from_slice(self.row(ii));
        }
        out
    }

    /// Columns `lo..hi` as a new matrix.
    pub fn slice_cols(&self, lo: usize, hi: usize) -> Matrix {
        assert!(lo <= hi && hi <= self.cols);
        let mut out = Matrix::zeros(self.rows, hi - lo);
        for i in 0..self.rows {
            out.row_mut(i).copy_from_slice(&self.row(i)[lo..hi]);
        }
        out
    }

    pub fn slice_rows(&self, lo: usize, hi: usize) -> Matrix {
        assert!(lo <= hi && hi <= self.rows);
        let mut out = Matrix::zeros(hi - lo, self.cols);
        for i in lo..hi {
            out.row_mut(i - lo).copy_from_slice(self.row(i));
        }
        out
    }

    /// Inverse column scatter: column j of `self` lands at column `perm[j]`.
    /// With `perm` from pivoted QR this undoes the pivoting, so
    /// `q.dot(&r).scatter_cols(&perm)` reassembles the original matrix.
    pub fn scatter_cols(&self, perm: &[usize]) -> Matrix {
        assert_eq!(perm.len(), self.cols);
        let mut out = Matrix::zeros(self.rows, self.cols);
        for (j, &pj) in perm.iter().enumerate() {
            for i in 0..self.rows {
                out[(i, pj)] = self[(i, j)];
            }
        }
        out
    }

    pub fn hstack(&self, b: &Matrix) -> Matrix {
        assert_eq!(self.rows, b.rows);
        let mut out = Matrix::zeros(self.rows, self.cols + b.cols);
        for i in 0..self.rows {
            out.row_mut(i)[..self.cols].copy_from_slice(self.row(i));
            out.row_mut(i)[self.cols..].copy_from_slice(b.row(i));
        }
        out
    }

    pub fn vstack(&self, b: &Matrix) -> Matrix {
        assert_eq!(self.cols, b.cols);
        let mut data = self.data.clone();
        data.extend_from_slice(&b.data);
        Matrix::from_raw(self.rows + b.rows, self.cols, data)
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}
