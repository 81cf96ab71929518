//! Complex Schur decomposition: Householder Hessenberg reduction followed by
//! single-shift QR iteration with Wilkinson shifts and deflation.

use crate::error::{Error, Result};
use crate::matrix::CMatrix;
use crate::scalar::{c_one, c_zero, cx, Cx, Real};

pub struct Schur<R: Real> {
    /// Unitary factor with A = Q T Q^H.
    pub q: CMatrix<R>,
    /// Upper triangular factor; eigenvalues on the diagonal.
    pub t: CMatrix<R>,
}

impl<R: Real> Schur<R> {
    pub fn eigenvalues(&self) -> Vec<Cx<R>> {
        (0..self.t.nrows()).map(|i| self.t[(i, i)]).collect()
    }
}

pub fn schur<R: Real>(a: &CMatrix<R>) -> Result<Schur<R>> {
    let n = a.nrows();
    debug_assert!(a.is_square());
    if n == 0 {
        return Ok(Schur {
            q: CMatrix::identity(0),
            t: CMatrix::identity(0),
        });
    }
    let (mut q, mut h) = hessenberg(a);
    qr_iterate(&mut h, &mut q)?;
    // Clean the strict lower triangle; the iteration drove it below tolerance.
    for i in 0..n {
        for j in 0..i {
            h[(i, j)] = c_zero();
        }
    }
    Ok(Schur { q, t: h })
}

pub fn eigenvalues<R: Real>(a: &CMatrix<R>) -> Result<Vec<Cx<R>>> {
    Ok(schur(a)?.eigenvalues())
}

/// Householder reduction A = Q H Q^H with H upper Hessenberg.
fn hessenberg<R: Real>(a: &CMatrix<R>) -> (CMatrix<R>, CMatrix<R>) {
    let n = a.nrows();
    let mut h = a.clone();
    let mut q = CMatrix::identity(n);
    if n < 3 {
        return (q, h);
    }
    for k in 0..n - 2 {
        // Reflect column k below the subdiagonal to zero.
        let len = n - k - 1;
        let mut v: Vec<Cx<R>> = (0..len).map(|i| h[(k + 1 + i, k)]).collect();
        let norm = v.iter().fold(R::zero(), |acc, z| acc + z.norm_sqr()).sqrt();
        if norm <= R::min_positive_value() {
            continue;
        }
        let alpha = if v[0].norm() > R::zero() {
            -(v[0] / cx(v[0].norm(), R::zero())) * cx(norm, R::zero())
        } else {
            cx(-norm, R::zero())
        };
        v[0] -= alpha;
        let vnorm = v.iter().fold(R::zero(), |acc, z| acc + z.norm_sqr()).sqrt();
        if vnorm <= norm * R::epsilon() {
            continue;
        }
        let inv = R::one() / vnorm;
        for z in &mut v {
            *z *= cx(inv, R::zero());
        }
        let two = cx(R::of(2.0), R::zero());
        // H := P H with P = I - 2 v v^H acting on rows k+1.. .
        for j in 0..n {
            let mut dot = c_zero::<R>();
            for i in 0..len {
                dot += v[i].conj() * h[(k + 1 + i, j)];
            }
            dot *= two;
            for i in 0..len {
                let vi = v[i];
                h[(k + 1 + i, j)] -= dot * vi;
            }
        }
        // H := H P on columns k+1.. .
        for i in 0..n {
            let mut dot = c_zero::<R>();
            for j in 0..len {
                dot += h[(i, k + 1 + j)] * v[j];
            }
            dot *= two;
            for j in 0..len {
                let vj = v[j].conj();
                h[(i, k + 1 + j)] -= dot * vj;
            }
        }
        // Q := Q P.
        for i in 0..n {
            let mut dot = c_zero::<R>();
            for j in 0..len {
                dot += q[(i, k + 1 + j)] * v[j];
            }
            dot *= two;
            for j in 0..len {
                let vj = v[j].conj();
                q[(i, k + 1 + j)] -= dot * vj;
            }
        }
        for i in k + 2..n {
            h[(i, k)] = c_zero();
        }
    }
    (q, h)
}

/// Unitary plane rotation G = [[c, s], [-conj(s), c]] with G [f; g] = [r; 0].
fn givens<R: Real>(f: Cx<R>, g: Cx<R>) -> (R, Cx<R>) {
    let fn_ = f.norm();
    let gn = g.norm();
    if gn == R::zero() {
        return (R::one(), c_zero());
    }
    if fn_ == R::zero() {
        return (R::zero(), g.conj() / cx(gn, R::zero()));
    }
    let d = (fn_ * fn_ + gn * gn).sqrt();
    let c = fn_ / d;
    let s = (f / cx(fn_, R::zero())) * g.conj() / cx(d, R::zero());
    (c, s)
}

fn qr_iterate<R: Real>(h: &mut CMatrix<R>, q: &mut CMatrix<R>) -> Result<()> {
    let n = h.nrows();
    if n < 2 {
        return Ok(());
    }
    let scale = h.max_abs().max(R::min_positive_value());
    let small = |x: R, local: R| x <= R::epsilon() * local.max(scale * R::epsilon());

    let mut hi = n - 1;
    let mut iters_at_hi = 0usize;
    let mut total = 0usize;
    let max_total = 120 * n;

    while hi > 0 {
        // Deflate converged subdiagonals at the active corner.
        let sub = h[(hi, hi - 1)].norm();
        let local = h[(hi - 1, hi - 1)].norm() + h[(hi, hi)].norm();
        if small(sub, local) {
            h[(hi, hi - 1)] = c_zero();
            hi -= 1;
            iters_at_hi = 0;
            continue;
        }
        // Find the start of the unreduced window.
        let mut lo = hi;
        while lo > 0 {
            let s = h[(lo, lo - 1)].norm();
            let l = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            if small(s, l) {
                h[(lo, lo - 1)] = c_zero();
                break;
            }
            lo -= 1;
        }

        total += 1;
        iters_at_hi += 1;
        if total > max_total {
            return Err(Error::Numerical(
                "QR iteration exceeded the iteration budget".into(),
            ));
        }

        let mu = if iters_at_hi.is_multiple_of(16) {
            // Exceptional shift to break rare cycling.
            h[(hi, hi)] + cx(h[(hi, hi - 1)].norm() * R::of(1.5), R::zero())
        } else {
            wilkinson_shift(h, hi)
        };

        // Implicit single-shift bulge chase on the window [lo, hi].
        let mut x = h[(lo, lo)] - mu;
        let mut y = h[(lo + 1, lo)];
        for k in lo..hi {
            let (c, s) = givens(x, y);
            let cs = cx(c, R::zero());
            // Rows k, k+1 from the left by G.
            for j in 0..n {
                let hk = h[(k, j)];
                let hk1 = h[(k + 1, j)];
                h[(k, j)] = hk * cs + hk1 * s;
                h[(k + 1, j)] = -(hk * s.conj()) + hk1 * cs;
            }
            // Columns k, k+1 from the right by G^H.
            for i in 0..n {
                let hk = h[(i, k)];
                let hk1 = h[(i, k + 1)];
                h[(i, k)] = hk * cs + hk1 * s.conj();
                h[(i, k + 1)] = -(hk * s) + hk1 * cs;
            }
            for i in 0..n {
                let qk = q[(i, k)];
                let qk1 = q[(i, k + 1)];
                q[(i, k)] = qk * cs + qk1 * s.conj();
                q[(i, k + 1)] = -(qk * s) + qk1 * cs;
            }
            if k + 2 <= hi {
                x = h[(k + 1, k)];
                y = h[(k + 2, k)];
            }
        }
    }
    Ok(())
}

/// Eigenvalue of the trailing 2x2 block closest to the corner entry.
fn wilkinson_shift<R: Real>(h: &CMatrix<R>, hi: usize) -> Cx<R> {
    let a = h[(hi - 1, hi - 1)];
    let b = h[(hi - 1, hi)];
    let c = h[(hi, hi - 1)];
    let d = h[(hi, hi)];
    let tr = a + d;
    let det = a * d - b * c;
    let half = cx(R::of(0.5), R::zero());
    let disc = (tr * tr - (det + det + det + det)).sqrt();
    let l1 = (tr + disc) * half;
    let l2 = (tr - disc) * half;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Eigenvector of the upper-triangular factor for the eigenvalue at
/// position `idx`, back-substituted and mapped through Q.
pub fn schur_eigenvector<R: Real>(s: &Schur<R>, idx: usize) -> Vec<Cx<R>> {
    let t = &s.t;
    let n = t.nrows();
    let lambda = t[(idx, idx)];
    let smallnum = t.max_abs().max(R::one()) * R::epsilon();
    let mut x = vec![c_zero::<R>(); n];
    x[idx] = c_one();
    for k in (0..idx).rev() {
        let mut num = c_zero::<R>();
        for j in k + 1..=idx {
            num += t[(k, j)] * x[j];
        }
        let mut den = t[(k, k)] - lambda;
        if den.norm() < smallnum {
            den = cx(smallnum, R::zero());
        }
        x[k] = -num / den;
        // Guard against overflow in pathologically graded triangles.
        let mag = x[k].norm();
        if mag > R::of(1e100) {
            let inv = R::one() / mag;
            for v in x.iter_mut() {
                *v *= cx(inv, R::zero());
            }
        }
    }
    let mut v = s.q.matvec(&x);
    let norm = v.iter().fold(R::zero(), |acc, z| acc + z.norm_sqr()).sqrt();
    if norm > R::zero() {
        let inv = R::one() / norm;
        for z in &mut v {
            *z *= cx(inv, R::zero());
        }
    }
    v
}

/// All eigenpairs of a general matrix via the Schur form.
pub fn eigen_pairs<R: Real>(a: &CMatrix<R>) -> Result<Vec<(Cx<R>, Vec<Cx<R>>)>> {
    let s = schur(a)?;
    Ok((0..a.nrows())
        .map(|i| (s.t[(i, i)], schur_eigenvector(&s, i)))
        .collect())
}
