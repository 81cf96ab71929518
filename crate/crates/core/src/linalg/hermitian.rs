//! Cyclic Jacobi eigendecomposition for Hermitian matrices.
//!
//! Chosen over tridiagonalization for its simplicity and near-machine
//! accuracy at the matrix sizes this crate targets. Works directly on
//! complex Hermitian input via phase-augmented plane rotations.

use crate::error::{Error, Result};
use crate::matrix::CMatrix;
use crate::scalar::{cx, Cx, Real};

pub struct HermitianEigen<R: Real> {
    /// Ascending eigenvalues.
    pub values: Vec<R>,
    /// Unitary matrix whose columns are the matching eigenvectors.
    pub vectors: CMatrix<R>,
}

const MAX_SWEEPS: usize = 64;

/// Eigendecomposition `M = V diag(values) V^H` of a Hermitian matrix.
/// The strict upper triangle is trusted; the input is symmetrized first.
pub fn hermitian_eigen<R: Real>(m: &CMatrix<R>) -> Result<HermitianEigen<R>> {
    let n = m.nrows();
    debug_assert!(m.is_square());
    let mut a = m.symmetrize();
    let mut v = CMatrix::identity(n);
    if n <= 1 {
        return Ok(HermitianEigen {
            values: (0..n).map(|i| a[(i, i)].re).collect(),
            vectors: v,
        });
    }
    let scale = a.max_abs().max(R::min_positive_value());
    let stop = scale * R::epsilon();

    for _sweep in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r <= stop {
                    continue;
                }
                rotated = true;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let phase = apq / cx(r, R::zero());
                let tau = (aqq - app) / (r + r);
                let t = if tau >= R::zero() {
                    R::one() / (tau + (R::one() + tau * tau).sqrt())
                } else {
                    -R::one() / (-tau + (R::one() + tau * tau).sqrt())
                };
                let c = R::one() / (R::one() + t * t).sqrt();
                let s = t * c;
                apply_rotation(&mut a, &mut v, p, q, c, s, phase);
            }
        }
        if !rotated {
            break;
        }
    }

    let mut off = R::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                off = off.max(a[(i, j)].norm());
            }
        }
    }
    if off > scale * R::epsilon() * R::of(1e3) {
        return Err(Error::Numerical(format!(
            "Jacobi eigensolver did not converge (off-diagonal residual {off:e})"
        )));
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<R> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).unwrap_or(std::cmp::Ordering::Equal));
    let values: Vec<R> = order.iter().map(|&i| diag[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(HermitianEigen { values, vectors })
}

/// A := G^H A G and V := V G with
/// G = [[c, s*phase], [-s*conj(phase), c]] acting on the (p, q) plane.
fn apply_rotation<R: Real>(
    a: &mut CMatrix<R>,
    v: &mut CMatrix<R>,
    p: usize,
    q: usize,
    c: R,
    s: R,
    phase: Cx<R>,
) {
    let n = a.nrows();
    let cs = cx(c, R::zero());
    let sp = phase * cx(s, R::zero());
    // Right multiply columns p, q by G.
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * cs - akq * sp.conj();
        a[(k, q)] = akp * sp + akq * cs;
    }
    // Left multiply rows p, q by G^H.
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * cs - aqk * sp;
        a[(q, k)] = apk * sp.conj() + aqk * cs;
    }
    a[(p, q)] = crate::scalar::c_zero();
    a[(q, p)] = crate::scalar::c_zero();
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * cs - vkq * sp.conj();
        v[(k, q)] = vkp * sp + vkq * cs;
    }
}

/// Hermitian PSD square root via eigendecomposition; eigenvalues in
/// `[-clamp_below, 0)` are clamped to zero.
pub fn psd_sqrt<R: Real>(m: &CMatrix<R>, clamp_below: R) -> Result<CMatrix<R>> {
    let eig = hermitian_eigen(m)?;
    if let Some(&min) = eig
        .values
        .first()
        .filter(|&&min| min < -clamp_below)
    {
        return Err(Error::Domain(format!(
            "matrix is not positive semi-definite (min eigenvalue {min:e})"
        )));
    }
    let roots: Vec<R> = eig
        .values
        .iter()
        .map(|&l| if l > R::zero() { l.sqrt() } else { R::zero() })
        .collect();
    Ok(scaled_congruence(&eig.vectors, &roots))
}

/// Inverse PSD square root; eigenvalues must be safely positive.
pub fn pd_inv_sqrt<R: Real>(m: &CMatrix<R>, min_allowed: R) -> Result<CMatrix<R>> {
    let eig = hermitian_eigen(m)?;
    if eig.values.iter().any(|&l| l <= min_allowed) {
        return Err(Error::Domain(format!(
            "matrix is not positive definite (min eigenvalue {:e})",
            eig.values[0]
        )));
    }
    let roots: Vec<R> = eig.values.iter().map(|&l| R::one() / l.sqrt()).collect();
    Ok(scaled_congruence(&eig.vectors, &roots))
}

/// V diag(d) V^H for real d.
fn scaled_congruence<R: Real>(v: &CMatrix<R>, d: &[R]) -> CMatrix<R> {
    let n = v.nrows();
    let mut scaled = v.clone();
    for j in 0..n {
        for i in 0..n {
            scaled[(i, j)] *= cx(d[j], R::zero());
        }
    }
    let out = &scaled * &v.adjoint();
    // The product is Hermitian in exact arithmetic; enforce it.
    out.symmetrize()
}

/// Eigenvalues of the skew-Hermitian matrix S are i*theta with theta real;
/// returns (thetas ascending, orthonormal eigenvector columns).
/// Uses the Hermitian reduction K = -i S.
pub fn skew_hermitian_eigen<R: Real>(s: &CMatrix<R>) -> Result<HermitianEigen<R>> {
    let k = s.scale(cx(R::zero(), -R::one())).symmetrize();
    hermitian_eigen(&k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonalizes_complex_hermitian() {
        let m = CMatrix::from_rows(&[
            vec![cx(2.0_f64, 0.0), cx(1.0, 1.0), cx(0.0, -2.0)],
            vec![cx(1.0, -1.0), cx(-1.0, 0.0), cx(0.5, 0.0)],
            vec![cx(0.0, 2.0), cx(0.5, 0.0), cx(3.0, 0.0)],
        ])
        .unwrap();
        let eig = hermitian_eigen(&m).unwrap();
        let v = &eig.vectors;
        let recon = &(v * &CMatrix::real_diagonal(&eig.values)) * &v.adjoint();
        assert!((&recon - &m).max_abs() < 1e-13);
        let vhv = &v.adjoint() * v;
        assert!((&vhv - &CMatrix::identity(3)).max_abs() < 1e-14);
        assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn sqrt_squares_back() {
        let m = CMatrix::from_real_rows(&[&[2.0_f64, -1.0], &[-1.0, 2.0]]);
        let r = psd_sqrt(&m, 1e-12).unwrap();
        assert!((&(&r * &r) - &m).max_abs() < 1e-13);
    }

    #[test]
    fn skew_eigenbasis() {
        let s = CMatrix::from_real_rows(&[&[0.0_f64, -3.0], &[3.0, 0.0]]);
        let eig = skew_hermitian_eigen(&s).unwrap();
        // Eigenvalues of S are +-3i, so thetas are +-3.
        assert!((eig.values[0] + 3.0).abs() < 1e-13);
        assert!((eig.values[1] - 3.0).abs() < 1e-13);
        for j in 0..2 {
            let v = eig.vectors.column(j);
            let sv = s.matvec(&v);
            let lam = cx(0.0, eig.values[j]);
            let res: f64 = sv
                .iter()
                .zip(&v)
                .map(|(a, b)| (a - lam * b).norm())
                .fold(0.0, f64::max);
            assert!(res < 1e-13);
        }
    }
}
