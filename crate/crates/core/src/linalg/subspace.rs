//! Subspace helpers: numerical kernels, principal overlaps between
//! subspaces, and eigenspace extraction for normal matrices.

use crate::error::Result;
use crate::linalg::svd::svd;
use crate::matrix::CMatrix;
use crate::scalar::{cx, Cx, Real};

/// Orthonormal basis of the numerical kernel of `m`: right singular vectors
/// whose singular values fall at or below `cutoff`. Returns an n x k matrix
/// (k possibly 0).
pub fn kernel_basis<R: Real>(m: &CMatrix<R>, cutoff: R) -> Result<CMatrix<R>> {
    let f = svd(m)?;
    let n = m.ncols();
    let rank = f.sigma.iter().take_while(|&&s| s > cutoff).count();
    Ok(CMatrix::from_fn(n, n - rank, |i, j| f.v[(i, rank + j)]))
}

/// Largest principal-angle cosine between the column spans of two
/// orthonormal bases, together with the corresponding unit vector in the
/// first span. Returns (0, None) if either basis is empty.
pub fn max_overlap<R: Real>(
    basis_a: &CMatrix<R>,
    basis_b: &CMatrix<R>,
) -> Result<(R, Option<Vec<Cx<R>>>)> {
    if basis_a.ncols() == 0 || basis_b.ncols() == 0 {
        return Ok((R::zero(), None));
    }
    let cross = &basis_a.adjoint() * basis_b;
    let f = svd(&cross)?;
    let sigma = f.sigma[0];
    // Unit vector in span(A) realizing the overlap: A * u_1.
    let u1 = f.u.column(0);
    let mut v = vec![cx(R::zero(), R::zero()); basis_a.nrows()];
    for (j, &coef) in u1.iter().enumerate() {
        for i in 0..basis_a.nrows() {
            v[i] += basis_a[(i, j)] * coef;
        }
    }
    Ok((sigma, Some(v)))
}

/// Group sorted real values into clusters whose neighbors differ by at most
/// `tol`. Returns (cluster value, member indices into the input order).
pub fn cluster_values<R: Real>(values: &[R], tol: R) -> Vec<(R, Vec<usize>)> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].partial_cmp(&values[j]).unwrap_or(std::cmp::Ordering::Equal));
    let mut clusters: Vec<(R, Vec<usize>)> = Vec::new();
    for &idx in &order {
        match clusters.last_mut() {
            Some((repr, members)) if (values[idx] - *repr).abs() <= tol => {
                members.push(idx);
                // Keep the representative at the running mean for stability.
                let k = R::of_usize(members.len());
                *repr = *repr + (values[idx] - *repr) / k;
            }
            _ => clusters.push((values[idx], vec![idx])),
        }
    }
    clusters
}

/// Cluster complex values (eigenvalues) by absolute distance `tol`.
pub fn cluster_complex<R: Real>(values: &[Cx<R>], tol: R) -> Vec<(Cx<R>, Vec<usize>)> {
    let mut clusters: Vec<(Cx<R>, Vec<usize>)> = Vec::new();
    for (idx, &v) in values.iter().enumerate() {
        match clusters
            .iter_mut()
            .find(|(repr, _)| (v - *repr).norm() <= tol)
        {
            Some((repr, members)) => {
                members.push(idx);
                let k = R::of_usize(members.len());
                *repr = *repr + (v - *repr) / cx(k, R::zero());
            }
            None => clusters.push((v, vec![idx])),
        }
    }
    clusters
}

/// Columns of `vectors` selected by `indices`, as a new matrix.
pub fn select_columns<R: Real>(vectors: &CMatrix<R>, indices: &[usize]) -> CMatrix<R> {
    CMatrix::from_fn(vectors.nrows(), indices.len(), |i, j| {
        vectors[(i, indices[j])]
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_of_projector() {
        let m = CMatrix::from_real_rows(&[&[1.0_f64, 0.0, 0.0], &[0.0, 0.0, 0.0], &[0.0, 0.0, 1.0]]);
        let k = kernel_basis(&m, 1e-12).unwrap();
        assert_eq!(k.ncols(), 1);
        assert!((k[(1, 0)].norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn overlap_detects_shared_direction() {
        // span{e1, e2} vs span{e2, e3}: overlap 1 along e2.
        let a = CMatrix::from_real_rows(&[&[1.0_f64, 0.0], &[0.0, 1.0], &[0.0, 0.0]]);
        let b = CMatrix::from_real_rows(&[&[0.0_f64, 0.0], &[1.0, 0.0], &[0.0, 1.0]]);
        let (sigma, witness) = max_overlap(&a, &b).unwrap();
        assert!((sigma - 1.0).abs() < 1e-14);
        let w = witness.unwrap();
        assert!((w[1].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn disjoint_spans_have_small_overlap() {
        let a = CMatrix::from_real_rows(&[&[1.0_f64], &[0.0]]);
        let b = CMatrix::from_real_rows(&[&[0.0_f64], &[1.0]]);
        let (sigma, _) = max_overlap(&a, &b).unwrap();
        assert!(sigma < 1e-14);
    }

    #[test]
    fn clustering_groups_nearby() {
        let vals = [1.0_f64, 1.0 + 1e-10, 2.0, -3.0];
        let clusters = cluster_values(&vals, 1e-8);
        assert_eq!(clusters.len(), 3);
        assert_eq!(clusters[1].1.len(), 2);
    }
}
