//! One-sided Jacobi SVD for complex matrices.
//!
//! Orthogonalizes column pairs with unitary plane rotations until the Gram
//! matrix is diagonal. Delivers high relative accuracy for the small singular
//! values that drive every rank and definiteness decision downstream.

use crate::error::{Error, Result};
use crate::matrix::CMatrix;
use crate::scalar::{c_zero, cx, Cx, Real};

pub struct Svd<R: Real> {
    /// Left singular vectors, square m x m.
    pub u: CMatrix<R>,
    /// Singular values, nonincreasing, length min(m, n).
    pub sigma: Vec<R>,
    /// Right singular vectors, square n x n; A = U diag(sigma) V^H.
    pub v: CMatrix<R>,
}

const MAX_SWEEPS: usize = 96;

pub fn svd<R: Real>(a: &CMatrix<R>) -> Result<Svd<R>> {
    if a.nrows() >= a.ncols() {
        svd_tall(a)
    } else {
        // A = U S V^H  <=>  A^H = V S U^H
        let flipped = svd_tall(&a.adjoint())?;
        Ok(Svd {
            u: flipped.v,
            sigma: flipped.sigma,
            v: flipped.u,
        })
    }
}

/// Singular values only (no accumulation of U, V).
pub fn singular_values<R: Real>(a: &CMatrix<R>) -> Result<Vec<R>> {
    let tall = if a.nrows() >= a.ncols() {
        a.clone()
    } else {
        a.adjoint()
    };
    let (w, _) = orthogonalize_columns(tall, None)?;
    let mut sig: Vec<R> = (0..w.ncols()).map(|j| column_norm(&w, j)).collect();
    sig.sort_by(|x, y| y.partial_cmp(x).unwrap_or(std::cmp::Ordering::Equal));
    Ok(sig)
}

pub fn spectral_norm<R: Real>(a: &CMatrix<R>) -> Result<R> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Ok(R::zero());
    }
    Ok(singular_values(a)?[0])
}

fn svd_tall<R: Real>(a: &CMatrix<R>) -> Result<Svd<R>> {
    let (m, n) = (a.nrows(), a.ncols());
    debug_assert!(m >= n);
    let mut v = CMatrix::identity(n);
    let (w, _) = orthogonalize_columns(a.clone(), Some(&mut v))?;

    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<R> = (0..n).map(|j| column_norm(&w, j)).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap_or(std::cmp::Ordering::Equal));
    let sigma: Vec<R> = order.iter().map(|&j| norms[j]).collect();
    let v = CMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);

    let sig_max = sigma.first().copied().unwrap_or(R::zero());
    let negligible = sig_max * R::epsilon() * R::of_usize(m.max(4)) * R::of(8.0);

    let mut u = CMatrix::zeros(m, m);
    let mut filled = 0usize;
    for (slot, &j) in order.iter().enumerate() {
        if sigma[slot] > negligible {
            let inv = R::one() / sigma[slot];
            for i in 0..m {
                u[(i, slot)] = w[(i, j)] * cx(inv, R::zero());
            }
            filled = slot + 1;
        } else {
            break;
        }
    }
    complete_orthonormal(&mut u, filled)?;
    Ok(Svd { u, sigma, v })
}

fn column_norm<R: Real>(w: &CMatrix<R>, j: usize) -> R {
    (0..w.nrows())
        .fold(R::zero(), |acc, i| acc + w[(i, j)].norm_sqr())
        .sqrt()
}

/// Cyclic sweeps of unitary column rotations until all column pairs are
/// numerically orthogonal. Optionally accumulates the rotations into `v`.
fn orthogonalize_columns<R: Real>(
    mut w: CMatrix<R>,
    mut v: Option<&mut CMatrix<R>>,
) -> Result<(CMatrix<R>, usize)> {
    let (m, n) = (w.nrows(), w.ncols());
    if n <= 1 || m == 0 {
        return Ok((w, 0));
    }
    // Rotations on other pairs reintroduce correlations of order eps scaled
    // by the column length; the skip threshold must sit above that noise.
    let eps = R::epsilon() * R::of_usize(8 * m.max(n));
    for sweep in 0..MAX_SWEEPS {
        let mut rotated = false;
        // Columns negligible against the largest act as zero; rotating them
        // against a parallel large column would shrink them forever without
        // ever passing the relative orthogonality test.
        let mut max_sq = R::zero();
        for j in 0..n {
            let s = (0..m).fold(R::zero(), |acc, i| acc + w[(i, j)].norm_sqr());
            max_sq = max_sq.max(s);
        }
        let tiny_sq = max_sq * R::epsilon() * R::epsilon() * R::of_usize(m * m);
        for p in 0..n - 1 {
            for q in p + 1..n {
                let mut app = R::zero();
                let mut aqq = R::zero();
                let mut apq = c_zero::<R>();
                for i in 0..m {
                    let wp = w[(i, p)];
                    let wq = w[(i, q)];
                    app += wp.norm_sqr();
                    aqq += wq.norm_sqr();
                    apq += wp.conj() * wq;
                }
                if app <= tiny_sq || aqq <= tiny_sq {
                    continue;
                }
                let r = apq.norm();
                if r <= eps * (app * aqq).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = apq / cx(r, R::zero());
                let tau = (aqq - app) / (r + r);
                let t = if tau >= R::zero() {
                    R::one() / (tau + (R::one() + tau * tau).sqrt())
                } else {
                    -R::one() / (-tau + (R::one() + tau * tau).sqrt())
                };
                let c = R::one() / (R::one() + t * t).sqrt();
                let s = t * c;
                let cs = cx(c, R::zero());
                let sp = phase * cx(s, R::zero());
                for i in 0..m {
                    let wp = w[(i, p)];
                    let wq = w[(i, q)];
                    w[(i, p)] = wp * cs - wq * sp.conj();
                    w[(i, q)] = wp * sp + wq * cs;
                }
                if let Some(v) = v.as_deref_mut() {
                    for i in 0..n {
                        let vp = v[(i, p)];
                        let vq = v[(i, q)];
                        v[(i, p)] = vp * cs - vq * sp.conj();
                        v[(i, q)] = vp * sp + vq * cs;
                    }
                }
            }
        }
        if !rotated {
            return Ok((w, sweep + 1));
        }
    }
    Err(Error::Numerical(
        "one-sided Jacobi SVD did not converge".into(),
    ))
}

/// Fill columns `filled..` of `u` with an orthonormal completion.
fn complete_orthonormal<R: Real>(u: &mut CMatrix<R>, filled: usize) -> Result<()> {
    let m = u.nrows();
    let mut have = filled;
    let mut candidate = 0usize;
    while have < m {
        if candidate >= m {
            return Err(Error::Numerical(
                "failed to complete orthonormal basis".into(),
            ));
        }
        let mut col: Vec<Cx<R>> = (0..m)
            .map(|i| {
                if i == candidate {
                    cx(R::one(), R::zero())
                } else {
                    c_zero()
                }
            })
            .collect();
        // Two Gram-Schmidt passes against the existing columns.
        for _ in 0..2 {
            for k in 0..have {
                let mut dot = c_zero::<R>();
                for i in 0..m {
                    dot += u[(i, k)].conj() * col[i];
                }
                for i in 0..m {
                    let uik = u[(i, k)];
                    col[i] -= dot * uik;
                }
            }
        }
        let norm = col.iter().fold(R::zero(), |acc, z| acc + z.norm_sqr()).sqrt();
        candidate += 1;
        if norm < R::of(0.1) {
            continue;
        }
        let inv = R::one() / norm;
        for i in 0..m {
            u[(i, have)] = col[i] * cx(inv, R::zero());
        }
        have += 1;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_svd(a: &CMatrix<f64>) {
        let f = svd(a).unwrap();
        let (m, n) = (a.nrows(), a.ncols());
        let mut sig = CMatrix::zeros(m, n);
        for (k, &s) in f.sigma.iter().enumerate() {
            sig[(k, k)] = cx(s, 0.0);
        }
        let recon = &(&f.u * &sig) * &f.v.adjoint();
        let scale = a.max_abs().max(1.0);
        assert!((&recon - a).max_abs() < 1e-13 * scale, "reconstruction");
        assert!((&(&f.u.adjoint() * &f.u) - &CMatrix::identity(m)).max_abs() < 1e-13);
        assert!((&(&f.v.adjoint() * &f.v) - &CMatrix::identity(n)).max_abs() < 1e-13);
        assert!(f.sigma.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn square_complex() {
        let a = CMatrix::from_rows(&[
            vec![cx(1.0, 2.0), cx(0.0, -1.0), cx(3.0, 0.0)],
            vec![cx(0.0, 0.0), cx(2.0, 1.0), cx(-1.0, 0.5)],
            vec![cx(4.0, -1.0), cx(0.0, 0.0), cx(0.5, 0.5)],
        ])
        .unwrap();
        check_svd(&a);
    }

    #[test]
    fn rank_deficient_and_rectangular() {
        // Upper shift: singular values 1, 1, 0.
        let shift = CMatrix::from_real_rows(&[&[0.0_f64, 1.0, 0.0], &[0.0, 0.0, 1.0], &[0.0, 0.0, 0.0]]);
        let f = svd(&shift).unwrap();
        assert!((f.sigma[0] - 1.0).abs() < 1e-14);
        assert!((f.sigma[1] - 1.0).abs() < 1e-14);
        assert!(f.sigma[2].abs() < 1e-14);
        check_svd(&shift);

        let wide = CMatrix::from_real_rows(&[&[1.0_f64, 0.0, 2.0, 0.0], &[0.0, 0.0, 0.0, 0.0]]);
        check_svd(&wide);

        let zero = CMatrix::<f64>::zeros(2, 4);
        check_svd(&zero);
    }
}
