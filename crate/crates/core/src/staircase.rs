//! Unitary staircase reductions for two matrix pairs:
//!
//! * `(J, R)` with J skew-Hermitian and R Hermitian: block tridiagonal J with
//!   a decoupled terminal block, R compressed to diag(R1, 0).
//! * `(U, Q)` with U unitary and Q Hermitian semi-contractive: block upper
//!   Hessenberg U with a decoupled terminal block, Q compressed to
//!   diag(Q1, I, ..., I).
//!
//! Both run the same compression loop: a spectral split of the second matrix
//! followed by SVD rank compressions of the subdiagonal blocks of the first.
//! The number of stairs s exposes the index: finite iff the terminal block is
//! empty, in which case the index is s - 2.

use crate::error::{Error, Result};
use crate::linalg::hermitian::hermitian_eigen;
use crate::linalg::subspace::select_columns;
use crate::linalg::svd::svd;
use crate::matcore::{RankGap, Tolerances};
use crate::matrix::CMatrix;
use crate::scalar::{cx, Real};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StaircaseKind {
    /// Skew-Hermitian / Hermitian pair.
    JR,
    /// Unitary / PSD-contraction polar pair.
    UQ,
}

/// Structural health of a computed staircase form.
#[derive(Debug, Clone, Serialize)]
pub struct StaircaseValidity<R: Real> {
    pub unitarity_defect: R,
    pub reconstruction_error_first: R,
    pub reconstruction_error_second: R,
    /// Largest entry outside the permitted block pattern, relative to the
    /// norm of the corresponding input.
    pub max_offpattern_first: R,
    pub max_offpattern_second: R,
    pub monotone_blocks: bool,
    pub subdiagonals_full_rank: bool,
    pub last_subdiagonal_real_diagonal: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct StaircaseForm<R: Real> {
    /// Accumulated unitary transform.
    pub v: CMatrix<R>,
    /// Block sizes n_1, ..., n_s (n_s may be zero).
    pub block_sizes: Vec<usize>,
    /// Number of stairs.
    pub s: usize,
    /// V J V^H or V U V^H.
    pub transformed_first: CMatrix<R>,
    /// V R V^H or V Q V^H.
    pub transformed_second: CMatrix<R>,
    /// The full-row-rank subdiagonal blocks [Sigma_{i,i-1} 0], i = 2..s-1.
    pub subdiagonal_blocks: Vec<CMatrix<R>>,
    pub kind: StaircaseKind,
    pub rank_audit: Vec<RankGap<R>>,
    pub validity: StaircaseValidity<R>,
}

/// Staircase reduction of a skew-Hermitian / Hermitian pair.
pub fn staircase_jr<R: Real>(
    j: &CMatrix<R>,
    r: &CMatrix<R>,
    tol: &Tolerances<R>,
) -> Result<StaircaseForm<R>> {
    j.check_square_finite("staircase J")?;
    r.check_square_finite("staircase R")?;
    let n = j.nrows();
    if r.nrows() != n {
        return Err(Error::InvalidInput("staircase: dimension mismatch".into()));
    }
    let scale = j.max_abs().max(r.max_abs()).max(R::min_positive_value());
    if j.skew_defect() > tol.tol_sym * scale {
        return Err(Error::Domain("staircase_jr: J must be skew-Hermitian".into()));
    }
    if r.hermitian_defect() > tol.tol_sym * scale {
        return Err(Error::Domain("staircase_jr: R must be Hermitian".into()));
    }
    if r.max_abs() <= R::min_positive_value() {
        return Err(Error::Domain("staircase_jr: R must be nonzero".into()));
    }

    // Spectral split of R: eigenvalues above the rank cutoff lead the basis.
    let eig = hermitian_eigen(&r.symmetrize())?;
    let lead_mag = eig
        .values
        .iter()
        .map(|v| v.abs())
        .fold(R::zero(), R::max);
    let cutoff = tol.rank_cutoff(n) * lead_mag;
    let mut lead: Vec<usize> = Vec::new();
    let mut trail: Vec<usize> = Vec::new();
    for (i, &v) in eig.values.iter().enumerate() {
        if v.abs() > cutoff {
            lead.push(i);
        } else {
            trail.push(i);
        }
    }
    let n1 = lead.len();
    let order: Vec<usize> = lead.into_iter().chain(trail).collect();
    let basis = select_columns(&eig.vectors, &order);
    let v0 = basis.adjoint();

    reduce(j, r, v0, n1, StaircaseKind::JR, tol)
}

/// Staircase reduction of a unitary / semi-contractive Hermitian pair.
pub fn staircase_uq<R: Real>(
    u: &CMatrix<R>,
    q: &CMatrix<R>,
    tol: &Tolerances<R>,
) -> Result<StaircaseForm<R>> {
    u.check_square_finite("staircase U")?;
    q.check_square_finite("staircase Q")?;
    let n = u.nrows();
    if q.nrows() != n {
        return Err(Error::InvalidInput("staircase: dimension mismatch".into()));
    }
    let gram = &u.adjoint() * u;
    if (&gram - &CMatrix::identity(n)).max_abs() > tol.tol_unit.max(R::of(1e-10)) {
        return Err(Error::Domain("staircase_uq: U must be unitary".into()));
    }
    let scale = q.max_abs().max(R::min_positive_value());
    if q.hermitian_defect() > tol.tol_sym * scale {
        return Err(Error::Domain("staircase_uq: Q must be Hermitian".into()));
    }
    // Q = 0 is contractive and lands in the trivial two-stair branch.

    // Spectral split of Q: eigenvalues within tol_psd of 1 form the identity
    // block; everything else is the contractive block. Spectrum must sit in
    // [0, 1] within the same margin.
    let eig = hermitian_eigen(&q.symmetrize())?;
    let margin = tol.tol_psd;
    if eig
        .values
        .iter()
        .any(|&v| v < -margin || v > R::one() + margin)
    {
        return Err(Error::Domain(format!(
            "staircase_uq: spectrum of Q must lie in [0, 1], found [{:e}, {:e}]",
            eig.values[0],
            eig.values[eig.values.len() - 1]
        )));
    }
    let mut lead: Vec<usize> = Vec::new();
    let mut trail: Vec<usize> = Vec::new();
    for (i, &v) in eig.values.iter().enumerate() {
        if v < R::one() - margin {
            lead.push(i);
        } else {
            trail.push(i);
        }
    }
    let n1 = lead.len();
    let order: Vec<usize> = lead.into_iter().chain(trail).collect();
    let basis = select_columns(&eig.vectors, &order);
    let v0 = basis.adjoint();

    reduce(u, q, v0, n1, StaircaseKind::UQ, tol)
}

/// Shared compression loop. `v0` is the unitary from the spectral split and
/// `n1` the size of its leading block.
fn reduce<R: Real>(
    first: &CMatrix<R>,
    second: &CMatrix<R>,
    v0: CMatrix<R>,
    n1: usize,
    kind: StaircaseKind,
    tol: &Tolerances<R>,
) -> Result<StaircaseForm<R>> {
    let n = first.nrows();
    let mut v = v0;
    let mut a = &(&v * first) * &v.adjoint();
    let mut rank_audit: Vec<RankGap<R>> = Vec::new();
    let mut sizes: Vec<usize> = vec![n1];
    let scale = first.max_abs().max(R::min_positive_value());

    // Degenerate splits: everything decoupled, or no trailing block at all.
    if n1 == 0 {
        sizes.push(n);
        return assemble(first, second, v, a, sizes, kind, rank_audit, tol);
    }
    if n1 == n {
        sizes.push(0);
        return assemble(first, second, v, a, sizes, kind, rank_audit, tol);
    }

    loop {
        let stage = sizes.len() + 1;
        let processed: usize = sizes.iter().sum();
        let trailing = n - processed;
        if trailing == 0 {
            sizes.push(0);
            break;
        }
        let prev = *sizes.last().expect("at least one block");
        let col0 = processed - prev;
        let block = a.block(processed, col0, trailing, prev);
        let f = svd(&block)?;
        let cutoff = tol.rank_cutoff(n) * scale;
        let rank = f.sigma.iter().take_while(|&&s| s > cutoff).count();
        rank_audit.push(RankGap {
            context: format!("subdiagonal compression at stage {stage}"),
            rank,
            sigma_accept: if rank > 0 { Some(f.sigma[rank - 1]) } else { None },
            sigma_reject: f.sigma.get(rank).copied(),
            cutoff,
        });
        if rank == 0 {
            // Zero coupling block: the rest decouples, index is infinite.
            break;
        }
        let mut vi = CMatrix::identity(n);
        vi.set_block(col0, col0, &f.v.adjoint());
        vi.set_block(processed, processed, &f.u.adjoint());
        v = &vi * &v;
        a = &(&vi * &a) * &vi.adjoint();
        sizes.push(rank);
    }

    assemble(first, second, v, a, sizes, kind, rank_audit, tol)
}

#[allow(clippy::too_many_arguments)]
fn assemble<R: Real>(
    first: &CMatrix<R>,
    second: &CMatrix<R>,
    v: CMatrix<R>,
    transformed_first: CMatrix<R>,
    mut sizes: Vec<usize>,
    kind: StaircaseKind,
    rank_audit: Vec<RankGap<R>>,
    tol: &Tolerances<R>,
) -> Result<StaircaseForm<R>> {
    let n = first.nrows();
    let processed: usize = sizes.iter().sum();
    if processed < n {
        sizes.push(n - processed);
    }
    let s = sizes.len();
    let transformed_second = &(&v * second) * &v.adjoint();

    let offsets: Vec<usize> = sizes
        .iter()
        .scan(0usize, |acc, &sz| {
            let start = *acc;
            *acc += sz;
            Some(start)
        })
        .collect();

    let mut subdiagonal_blocks = Vec::new();
    for i in 2..s {
        let bi = i - 1;
        subdiagonal_blocks.push(transformed_first.block(
            offsets[bi],
            offsets[bi - 1],
            sizes[bi],
            sizes[bi - 1],
        ));
    }

    let validity = validate(
        first,
        second,
        &v,
        &transformed_first,
        &transformed_second,
        &sizes,
        &offsets,
        kind,
        &subdiagonal_blocks,
        tol,
    )?;

    Ok(StaircaseForm {
        v,
        block_sizes: sizes,
        s,
        transformed_first,
        transformed_second,
        subdiagonal_blocks,
        kind,
        rank_audit,
        validity,
    })
}

#[allow(clippy::too_many_arguments)]
fn validate<R: Real>(
    first: &CMatrix<R>,
    second: &CMatrix<R>,
    v: &CMatrix<R>,
    tf: &CMatrix<R>,
    ts: &CMatrix<R>,
    sizes: &[usize],
    offsets: &[usize],
    kind: StaircaseKind,
    subdiagonals: &[CMatrix<R>],
    tol: &Tolerances<R>,
) -> Result<StaircaseValidity<R>> {
    let n = first.nrows();
    let s = sizes.len();
    let unitarity_defect = (&(&v.adjoint() * v) - &CMatrix::identity(n)).max_abs();
    let recon_first = (&(&(v * first) * &v.adjoint()) - tf).max_abs();
    let recon_second = (&(&(v * second) * &v.adjoint()) - ts).max_abs();
    let scale_first = first.max_abs().max(R::min_positive_value());
    let scale_second = second.max_abs().max(R::min_positive_value());

    // Stage index (1-based) of each scalar row/column.
    let stage_of = |idx: usize| -> usize {
        for (k, &off) in offsets.iter().enumerate() {
            if idx >= off && idx < off + sizes[k] {
                return k + 1;
            }
        }
        s
    };

    let mut off_first = R::zero();
    let mut off_second = R::zero();
    for row in 0..n {
        for col in 0..n {
            let bi = stage_of(row);
            let bj = stage_of(col);
            let allowed_first = match kind {
                // Block tridiagonal on stages 1..s-1 plus the decoupled corner.
                StaircaseKind::JR => {
                    (bi < s && bj < s && bi.abs_diff(bj) <= 1) || (bi == s && bj == s)
                }
                // Block upper Hessenberg on stages 1..s-1 plus the corner.
                StaircaseKind::UQ => (bi < s && bj < s && bj + 1 >= bi) || (bi == s && bj == s),
            };
            if !allowed_first {
                off_first = off_first.max(tf[(row, col)].norm());
            }
            let allowed_second = match kind {
                // diag(R1, 0): only the leading block.
                StaircaseKind::JR => bi == 1 && bj == 1,
                // diag(Q1, I, ..., I): block diagonal; identity checked below.
                StaircaseKind::UQ => bi == bj,
            };
            if !allowed_second {
                off_second = off_second.max(ts[(row, col)].norm());
            }
        }
    }
    if kind == StaircaseKind::UQ {
        // Trailing diagonal blocks must be identities.
        for k in 1..s {
            for r in 0..sizes[k] {
                for c in 0..sizes[k] {
                    let val = ts[(offsets[k] + r, offsets[k] + c)];
                    let expect = if r == c {
                        cx(R::one(), R::zero())
                    } else {
                        cx(R::zero(), R::zero())
                    };
                    off_second = off_second.max((val - expect).norm());
                }
            }
        }
    }

    let interior_positive = if s >= 2 {
        sizes[1..s - 1].iter().all(|&x| x > 0)
    } else {
        true
    };
    let monotone_blocks =
        (0..s.saturating_sub(2)).all(|k| sizes[k] >= sizes[k + 1]) && interior_positive;

    let mut subdiagonals_full_rank = true;
    for (k, block) in subdiagonals.iter().enumerate() {
        let ni = sizes[k + 1];
        let square = block.block(0, 0, ni, ni);
        let sig = crate::linalg::svd::singular_values(&square)?;
        let smallest = sig.last().copied().unwrap_or(R::zero());
        if smallest <= tol.rank_cutoff(n) * scale_first {
            subdiagonals_full_rank = false;
        }
        // Outside the leading square the block must vanish: [Sigma 0].
        for r in 0..block.nrows() {
            for c in ni..block.ncols() {
                off_first = off_first.max(block[(r, c)].norm());
            }
        }
    }

    // The last computed subdiagonal is a fresh SVD factor: real diagonal.
    let mut last_real_diag = true;
    if let Some(last) = subdiagonals.last() {
        let ni = last.nrows();
        for r in 0..ni {
            for c in 0..ni {
                let z = last[(r, c)];
                if r == c {
                    if z.im.abs() > tol.tol_recon * scale_first || z.re < R::zero() {
                        last_real_diag = false;
                    }
                } else if z.norm() > tol.tol_recon * scale_first {
                    last_real_diag = false;
                }
            }
        }
    }

    Ok(StaircaseValidity {
        unitarity_defect,
        reconstruction_error_first: recon_first / scale_first,
        reconstruction_error_second: recon_second / scale_second,
        max_offpattern_first: off_first / scale_first,
        max_offpattern_second: off_second / scale_second,
        monotone_blocks,
        subdiagonals_full_rank,
        last_subdiagonal_real_diagonal: last_real_diag,
    })
}

/// Index read-off: finite iff the terminal block is empty, value s - 2.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct StaircaseIndex {
    pub finite: bool,
    pub index: Option<usize>,
}

pub fn index_from_staircase<R: Real>(form: &StaircaseForm<R>) -> StaircaseIndex {
    let terminal = *form.block_sizes.last().unwrap_or(&0);
    if terminal == 0 {
        StaircaseIndex {
            finite: true,
            index: Some(form.s - 2),
        }
    } else {
        StaircaseIndex {
            finite: false,
            index: None,
        }
    }
}
