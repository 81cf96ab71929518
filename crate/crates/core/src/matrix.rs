//! Dense complex matrices with the handful of operations the analysis needs.
//!
//! Row-major storage, desk-scale sizes (n up to a few hundred). Real inputs
//! are promoted to complex on construction; the math throughout is over
//! `C^{m x n}`.

use crate::error::{Error, Result};
use crate::scalar::{c_one, c_zero, Cx, Real};
use num_complex::Complex;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix<R: Real> {
    rows: usize,
    cols: usize,
    data: Vec<Cx<R>>,
}

impl<R: Real> CMatrix<R> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![c_zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = c_one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Cx<R>) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Build from rows of complex entries.
    pub fn from_rows(entries: &[Vec<Cx<R>>]) -> Result<Self> {
        let rows = entries.len();
        let cols = entries.first().map_or(0, |r| r.len());
        if entries.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidInput("ragged row lengths".into()));
        }
        let mut m = Self::zeros(rows, cols);
        for (i, row) in entries.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        Ok(m)
    }

    /// Promote a real matrix given as rows.
    pub fn from_real_rows(entries: &[&[R]]) -> Self {
        let rows = entries.len();
        let cols = entries.first().map_or(0, |r| r.len());
        Self::from_fn(rows, cols, |i, j| Complex::new(entries[i][j], R::zero()))
    }

    pub fn diagonal(values: &[Cx<R>]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn real_diagonal(values: &[R]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| {
            if i == j {
                Complex::new(values[i], R::zero())
            } else {
                c_zero()
            }
        })
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Reject empty, non-square or non-finite input with an input error.
    pub fn check_square_finite(&self, what: &str) -> Result<()> {
        if self.rows == 0 || self.cols == 0 {
            return Err(Error::InvalidInput(format!("{what} is empty")));
        }
        if !self.is_square() {
            return Err(Error::InvalidInput(format!(
                "{what} must be square, got {}x{}",
                self.rows, self.cols
            )));
        }
        if !self.is_finite() {
            return Err(Error::InvalidInput(format!("{what} has NaN/Inf entries")));
        }
        Ok(())
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&self, factor: Cx<R>) -> Self {
        let mut out = self.clone();
        for v in &mut out.data {
            *v *= factor;
        }
        out
    }

    pub fn scale_real(&self, factor: R) -> Self {
        self.scale(Complex::new(factor, R::zero()))
    }

    pub fn frobenius_norm(&self) -> R {
        self.data
            .iter()
            .fold(R::zero(), |acc, z| acc + z.norm_sqr())
            .sqrt()
    }

    /// Maximum absolute column sum.
    pub fn one_norm(&self) -> R {
        (0..self.cols)
            .map(|j| (0..self.rows).fold(R::zero(), |acc, i| acc + self[(i, j)].norm()))
            .fold(R::zero(), R::max)
    }

    pub fn max_abs(&self) -> R {
        self.data.iter().map(|z| z.norm()).fold(R::zero(), R::max)
    }

    pub fn column(&self, j: usize) -> Vec<Cx<R>> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_column(&mut self, j: usize, col: &[Cx<R>]) {
        for (i, &v) in col.iter().enumerate() {
            self[(i, j)] = v;
        }
    }

    pub fn block(&self, row0: usize, col0: usize, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |i, j| self[(row0 + i, col0 + j)])
    }

    pub fn set_block(&mut self, row0: usize, col0: usize, b: &CMatrix<R>) {
        for i in 0..b.rows {
            for j in 0..b.cols {
                self[(row0 + i, col0 + j)] = b[(i, j)];
            }
        }
    }

    /// Horizontal concatenation `[self, other]`.
    pub fn hcat(&self, other: &CMatrix<R>) -> Self {
        debug_assert_eq!(self.rows, other.rows);
        let mut out = Self::zeros(self.rows, self.cols + other.cols);
        out.set_block(0, 0, self);
        out.set_block(0, self.cols, other);
        out
    }

    pub fn matvec(&self, x: &[Cx<R>]) -> Vec<Cx<R>> {
        debug_assert_eq!(self.cols, x.len());
        (0..self.rows)
            .map(|i| {
                (0..self.cols).fold(c_zero(), |acc, j| acc + self[(i, j)] * x[j])
            })
            .collect()
    }

    /// Hermitian part `(A + A^H)/2`.
    pub fn hermitian_part(&self) -> Self {
        let half = Complex::new(R::of(0.5), R::zero());
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] + self[(j, i)].conj()) * half
        })
    }

    /// Skew-Hermitian part `(A - A^H)/2`.
    pub fn skew_part(&self) -> Self {
        let half = Complex::new(R::of(0.5), R::zero());
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] - self[(j, i)].conj()) * half
        })
    }

    pub fn hermitian_defect(&self) -> R {
        let mut worst = R::zero();
        for i in 0..self.rows {
            for j in 0..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn skew_defect(&self) -> R {
        let mut worst = R::zero();
        for i in 0..self.rows {
            for j in 0..self.cols {
                worst = worst.max((self[(i, j)] + self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Force exact Hermitian symmetry (averages with the adjoint).
    pub fn symmetrize(&self) -> Self {
        self.hermitian_part()
    }

    pub fn pow(&self, k: usize) -> Self {
        debug_assert!(self.is_square());
        let mut acc = Self::identity(self.rows);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    pub fn data(&self) -> &[Cx<R>] {
        &self.data
    }
}

impl<R: Real> Index<(usize, usize)> for CMatrix<R> {
    type Output = Cx<R>;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Cx<R> {
        &self.data[i * self.cols + j]
    }
}

impl<R: Real> IndexMut<(usize, usize)> for CMatrix<R> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Cx<R> {
        &mut self.data[i * self.cols + j]
    }
}

impl<R: Real> Add for &CMatrix<R> {
    type Output = CMatrix<R>;
    fn add(self, rhs: &CMatrix<R>) -> CMatrix<R> {
        debug_assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&rhs.data) {
            *a += *b;
        }
        out
    }
}

impl<R: Real> Sub for &CMatrix<R> {
    type Output = CMatrix<R>;
    fn sub(self, rhs: &CMatrix<R>) -> CMatrix<R> {
        debug_assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&rhs.data) {
            *a -= *b;
        }
        out
    }
}

impl<R: Real> Neg for &CMatrix<R> {
    type Output = CMatrix<R>;
    fn neg(self) -> CMatrix<R> {
        let mut out = self.clone();
        for a in &mut out.data {
            *a = -*a;
        }
        out
    }
}

impl<R: Real> Mul for &CMatrix<R> {
    type Output = CMatrix<R>;
    fn mul(self, rhs: &CMatrix<R>) -> CMatrix<R> {
        debug_assert_eq!(self.cols, rhs.rows);
        let mut out = CMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self[(i, k)];
                if aik == c_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += aik * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl<R: Real> serde::Serialize for CMatrix<R> {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        // Rows of [re, im] pairs, matching the matrix-file entry encoding.
        let mut seq = serializer.serialize_seq(Some(self.rows))?;
        for i in 0..self.rows {
            let row: Vec<[R; 2]> = (0..self.cols).map(|j| [self[(i, j)].re, self[(i, j)].im]).collect();
            seq.serialize_element(&row)?;
        }
        seq.end()
    }
}

/// Add `shift * I` to a square matrix.
pub fn shift_identity<R: Real>(a: &CMatrix<R>, shift: Cx<R>) -> CMatrix<R> {
    debug_assert!(a.is_square());
    let mut out = a.clone();
    for i in 0..a.nrows() {
        out[(i, i)] += shift;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;

    #[test]
    fn product_and_adjoint() {
        let a = CMatrix::from_real_rows(&[&[1.0_f64, 2.0], &[3.0, 4.0]]);
        let b = CMatrix::from_fn(2, 2, |i, j| cx((i + j) as f64, 1.0));
        let ab = &a * &b;
        // (A B)^H = B^H A^H
        let lhs = ab.adjoint();
        let rhs = &b.adjoint() * &a.adjoint();
        assert!((&lhs - &rhs).max_abs() < 1e-14);
    }

    #[test]
    fn hermitian_skew_split_reconstructs() {
        let a = CMatrix::from_fn(3, 3, |i, j| cx(i as f64 - j as f64, (i * j) as f64));
        let h = a.hermitian_part();
        let s = a.skew_part();
        assert!(h.hermitian_defect() < 1e-15);
        assert!(s.skew_defect() < 1e-15);
        assert!((&(&h + &s) - &a).max_abs() < 1e-15);
    }
}
