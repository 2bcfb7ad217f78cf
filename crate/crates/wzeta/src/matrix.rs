//! Dense row-major matrices over a generic weight scalar.
//!
//! These are small working matrices for translation families, block
//! extraction, and conversions toward the `f64` spectral routines. They are
//! not meant to compete with a linear algebra library at scale.

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};
use crate::scalar::{KahanSum, Scalar};

pub type Complex64 = Complex<f64>;

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<W> {
    rows: usize,
    cols: usize,
    data: Vec<W>,
}

impl<W: Scalar> Matrix<W> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![W::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = W::one();
        }
        m
    }

    /// Builds from a flat row-major slice of length `rows * cols`.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<W>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, got: data.len() });
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, got: other.rows });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = KahanSum::new();
                for k in 0..self.cols {
                    acc.add(self[(i, k)].clone() * other[(k, j)].clone());
                }
                out[(i, j)] = acc.value();
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch { expected: self.data.len(), got: other.data.len() });
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.clone() - b.clone())
            .collect();
        Ok(Matrix { rows: self.rows, cols: self.cols, data })
    }

    /// Matrix power by repeated multiplication; `pow(0)` is the identity.
    pub fn pow(&self, n: u64) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::InvalidArgument("matrix power needs a square matrix".into()));
        }
        let mut out = Self::identity(self.rows);
        for _ in 0..n {
            out = out.mul(self)?;
        }
        Ok(out)
    }

    pub fn trace(&self) -> W {
        let mut acc = KahanSum::new();
        for i in 0..self.rows.min(self.cols) {
            acc.add(self[(i, i)].clone());
        }
        acc.value()
    }

    /// Kronecker product, with the left factor indexing the coarse blocks.
    pub fn kronecker(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out[(i * other.rows + k, j * other.cols + l)] =
                            self[(i, j)].clone() * other[(k, l)].clone();
                    }
                }
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data
            .iter()
            .map(|x| x.abs().to_f64().unwrap_or(f64::INFINITY))
            .fold(0.0, f64::max)
    }

    pub fn is_entrywise_nonnegative(&self) -> bool {
        self.data.iter().all(|x| *x >= W::zero())
    }

    pub fn convert<V: Scalar>(&self) -> Matrix<V> {
        let data = self
            .data
            .iter()
            .map(|x| V::from_f64(x.to_f64().expect("finite weight")).expect("finite weight"))
            .collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| {
            self[(i, j)].to_f64().expect("finite weight")
        })
    }

    pub fn to_complex(&self) -> DMatrix<Complex64> {
        self.to_dmatrix().map(|x| Complex::new(x, 0.0))
    }
}

impl<W> std::ops::Index<(usize, usize)> for Matrix<W> {
    type Output = W;
    fn index(&self, (i, j): (usize, usize)) -> &W {
        &self.data[i * self.cols + j]
    }
}

impl<W> std::ops::IndexMut<(usize, usize)> for Matrix<W> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut W {
        &mut self.data[i * self.cols + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::BigRational;

    fn m2(entries: [f64; 4]) -> Matrix<f64> {
        Matrix::from_row_major(2, 2, entries.to_vec()).unwrap()
    }

    #[test]
    fn multiply_and_power() {
        let a = m2([0.0, 1.0, 1.0, 0.0]);
        let sq = a.pow(2).unwrap();
        assert_eq!(sq, Matrix::identity(2));
        assert_eq!(a.pow(0).unwrap(), Matrix::identity(2));
    }

    #[test]
    fn kronecker_traces_multiply() {
        let a = m2([1.0, 2.0, 3.0, 4.0]);
        let b = m2([0.0, 1.0, 1.0, 1.0]);
        let k = a.kronecker(&b);
        assert_eq!(k.rows(), 4);
        assert!((k.trace() - a.trace() * b.trace()).abs() < 1e-12);
    }

    #[test]
    fn rational_multiplication_is_exact() {
        let a: Matrix<BigRational> = m2([0.5, 0.25, 1.5, 2.0]).convert();
        let product = a.mul(&a).unwrap();
        let expected: Matrix<BigRational> =
            m2([0.5 * 0.5 + 0.25 * 1.5, 0.5 * 0.25 + 0.25 * 2.0, 1.5 * 0.5 + 2.0 * 1.5, 1.5 * 0.25 + 2.0 * 2.0])
                .convert();
        assert_eq!(product, expected);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let a = m2([1.0; 4]);
        let b = Matrix::<f64>::zeros(3, 3);
        assert!(a.mul(&b).is_err());
    }
}
