//! LU decomposition with partial pivoting for complex matrices.

use crate::error::{Error, Result};
use crate::matrix::CMatrix;
use crate::scalar::{c_one, c_zero, Cx, Real};

pub struct Lu<R: Real> {
    factors: CMatrix<R>,
    perm: Vec<usize>,
    sign_flips: usize,
}

pub fn lu<R: Real>(a: &CMatrix<R>) -> Result<Lu<R>> {
    let n = a.nrows();
    debug_assert!(a.is_square());
    let mut m = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut sign_flips = 0usize;
    let scale = a.max_abs().max(R::min_positive_value());
    for k in 0..n {
        let mut piv = k;
        let mut best = m[(k, k)].norm();
        for i in (k + 1)..n {
            let v = m[(i, k)].norm();
            if v > best {
                best = v;
                piv = i;
            }
        }
        if best <= scale * R::epsilon() * R::of(16.0) {
            return Err(Error::Numerical(format!(
                "LU pivot {k} is numerically zero (|pivot| = {best:e})"
            )));
        }
        if piv != k {
            for j in 0..n {
                let tmp = m[(k, j)];
                m[(k, j)] = m[(piv, j)];
                m[(piv, j)] = tmp;
            }
            perm.swap(k, piv);
            sign_flips += 1;
        }
        let pivot = m[(k, k)];
        for i in (k + 1)..n {
            let factor = m[(i, k)] / pivot;
            m[(i, k)] = factor;
            for j in (k + 1)..n {
                let mkj = m[(k, j)];
                m[(i, j)] -= factor * mkj;
            }
        }
    }
    Ok(Lu {
        factors: m,
        perm,
        sign_flips,
    })
}

impl<R: Real> Lu<R> {
    pub fn solve_vec(&self, b: &[Cx<R>]) -> Vec<Cx<R>> {
        let n = self.factors.nrows();
        let mut x: Vec<Cx<R>> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 1..n {
            for j in 0..i {
                let f = self.factors[(i, j)];
                let xj = x[j];
                x[i] -= f * xj;
            }
        }
        for i in (0..n).rev() {
            for j in (i + 1)..n {
                let f = self.factors[(i, j)];
                let xj = x[j];
                x[i] -= f * xj;
            }
            x[i] /= self.factors[(i, i)];
        }
        x
    }

    /// Solve A X = B column by column.
    pub fn solve(&self, b: &CMatrix<R>) -> CMatrix<R> {
        let mut out = CMatrix::zeros(b.nrows(), b.ncols());
        for j in 0..b.ncols() {
            let col = self.solve_vec(&b.column(j));
            out.set_column(j, &col);
        }
        out
    }

    pub fn inverse(&self) -> CMatrix<R> {
        self.solve(&CMatrix::identity(self.factors.nrows()))
    }

    pub fn det(&self) -> Cx<R> {
        let n = self.factors.nrows();
        let mut d = if self.sign_flips.is_multiple_of(2) {
            c_one()
        } else {
            -c_one::<R>()
        };
        for i in 0..n {
            d *= self.factors[(i, i)];
        }
        d
    }
}

/// Convenience: solve A X = B.
pub fn solve<R: Real>(a: &CMatrix<R>, b: &CMatrix<R>) -> Result<CMatrix<R>> {
    Ok(lu(a)?.solve(b))
}

pub fn inverse<R: Real>(a: &CMatrix<R>) -> Result<CMatrix<R>> {
    Ok(lu(a)?.inverse())
}

/// Kronecker product `A (x) B` (used by the dense Lyapunov solvers).
pub fn kronecker<R: Real>(a: &CMatrix<R>, b: &CMatrix<R>) -> CMatrix<R> {
    let (am, an) = (a.nrows(), a.ncols());
    let (bm, bn) = (b.nrows(), b.ncols());
    let mut out = CMatrix::zeros(am * bm, an * bn);
    for i in 0..am {
        for j in 0..an {
            let aij = a[(i, j)];
            if aij == c_zero() {
                continue;
            }
            for p in 0..bm {
                for q in 0..bn {
                    out[(i * bm + p, j * bn + q)] = aij * b[(p, q)];
                }
            }
        }
    }
    out
}

/// Column-stacking vectorization.
pub fn vec_columns<R: Real>(a: &CMatrix<R>) -> Vec<Cx<R>> {
    let mut out = Vec::with_capacity(a.nrows() * a.ncols());
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            out.push(a[(i, j)]);
        }
    }
    out
}

pub fn unvec_columns<R: Real>(v: &[Cx<R>], rows: usize, cols: usize) -> CMatrix<R> {
    CMatrix::from_fn(rows, cols, |i, j| v[j * rows + i])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;

    #[test]
    fn solve_and_det() {
        let a = CMatrix::from_rows(&[
            vec![cx(2.0_f64, 1.0), cx(0.0, -1.0)],
            vec![cx(1.0, 0.0), cx(3.0, 0.0)],
        ])
        .unwrap();
        let f = lu(&a).unwrap();
        let x = f.solve(&CMatrix::identity(2));
        assert!((&(&a * &x) - &CMatrix::identity(2)).max_abs() < 1e-14);
        // det = (2+i)(3) - (-i)(1) = 6 + 3i + i = 6 + 4i
        let d = f.det();
        assert!((d - cx(6.0, 4.0)).norm() < 1e-13);
    }

    #[test]
    fn singular_detected() {
        let a = CMatrix::from_real_rows(&[&[1.0_f64, 2.0], &[2.0, 4.0]]);
        assert!(lu(&a).is_err());
    }

    #[test]
    fn kron_vec_identity() {
        // vec(A X B) = (B^T (x) A) vec(X)
        let a = CMatrix::from_real_rows(&[&[1.0_f64, 2.0], &[0.0, 1.0]]);
        let b = CMatrix::from_real_rows(&[&[3.0_f64, 1.0], &[1.0, 1.0]]);
        let x = CMatrix::from_real_rows(&[&[1.0_f64, -1.0], &[2.0, 0.5]]);
        let axb = &(&a * &x) * &b;
        let k = kronecker(&b.transpose(), &a);
        let lhs = vec_columns(&axb);
        let rhs = k.matvec(&vec_columns(&x));
        for (l, r) in lhs.iter().zip(&rhs) {
            assert!((l - r).norm() < 1e-13);
        }
    }
}
