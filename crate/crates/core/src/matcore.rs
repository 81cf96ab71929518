//! Matrix primitives shared by every classifier: Hermitian/skew splits,
//! polar decomposition, tolerance-audited numerical rank, PSD square roots,
//! the matrix exponential, spectral summary quantities, and the generic
//! engine that finds the minimal index for Kalman-rank vs Gram-definiteness
//! conditions.

use crate::error::{Error, Result};
use crate::linalg::expm::expm;
use crate::linalg::hermitian::{hermitian_eigen, psd_sqrt};
use crate::linalg::schur;
use crate::linalg::subspace::cluster_complex;
use crate::linalg::svd::{singular_values, svd};
use crate::matrix::CMatrix;
use crate::scalar::{cx, Cx, Real};
use serde::Serialize;

/// Absolute clustering tolerance for eigenvalues; also the detection band
/// for imaginary-axis and unit-modulus eigenvalues.
pub const EIG_CLUSTER_TOL: f64 = 1e-8;

/// Tolerance bundle threaded through every discrete decision.
#[derive(Debug, Clone, Serialize)]
pub struct Tolerances<R: Real> {
    /// Relative singular-value cutoff for rank decisions; `None` selects the
    /// dimension-aware default `n * 2^-40`.
    pub tol_rank: Option<R>,
    /// Relative margin for definiteness decisions.
    pub tol_psd: R,
    /// Relative tolerance for symmetry checks.
    pub tol_sym: R,
    /// Relative tolerance for reconstruction checks.
    pub tol_recon: R,
    /// Tolerance for unitarity checks.
    pub tol_unit: R,
}

impl<R: Real> Default for Tolerances<R> {
    fn default() -> Self {
        Tolerances {
            tol_rank: None,
            tol_psd: R::of(1e-10),
            tol_sym: R::of(1e-10),
            tol_recon: R::of(1e-10),
            tol_unit: R::of(1e-12),
        }
    }
}

impl<R: Real> Tolerances<R> {
    /// Relative rank cutoff for an operand with leading dimension `n`.
    pub fn rank_cutoff(&self, n: usize) -> R {
        match self.tol_rank {
            Some(t) => t,
            None => R::of_usize(n.max(1)) * R::of(2.0).powi(-40),
        }
    }

    pub fn scaled(&self, factor: R) -> Self {
        Tolerances {
            tol_rank: self.tol_rank.map(|t| t * factor),
            tol_psd: self.tol_psd * factor,
            tol_sym: self.tol_sym * factor,
            tol_recon: self.tol_recon * factor,
            tol_unit: self.tol_unit * factor,
        }
    }
}

/// Additive split A = H + S into Hermitian and skew-Hermitian parts.
#[derive(Debug, Clone)]
pub struct HermitianSplit<R: Real> {
    pub h: CMatrix<R>,
    pub s: CMatrix<R>,
}

/// Polar factors A = P U = U Q with P, Q Hermitian PSD and U unitary.
#[derive(Debug, Clone)]
pub struct PolarFactors<R: Real> {
    pub p: CMatrix<R>,
    pub u: CMatrix<R>,
    pub q: CMatrix<R>,
    /// Set when A is numerically singular: the unitary factor is then the
    /// canonical SVD choice rather than uniquely determined.
    pub unitary_not_unique: bool,
}

/// Eigen/singular data of one matrix.
#[derive(Debug, Clone, Serialize)]
pub struct SpectralData<R: Real> {
    pub eigenvalues: Vec<Cx<R>>,
    /// Per eigenvalue: geometric multiplicity of its cluster equals the
    /// cluster size.
    pub semisimple_flags: Vec<bool>,
    /// Nonincreasing singular values.
    pub singular_values: Vec<R>,
}

/// Summary scalars attached to [`SpectralData`].
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SpectralSummary<R: Real> {
    /// Spectral abscissa: max Re(lambda).
    pub alpha: R,
    /// Euclidean logarithmic norm: largest eigenvalue of the Hermitian part.
    pub mu: R,
    /// Spectral radius.
    pub rho: R,
    /// Largest singular value.
    pub sigma_max: R,
}

/// One audited rank decision: the singular values either side of the cut.
#[derive(Debug, Clone, Serialize)]
pub struct RankGap<R: Real> {
    pub context: String,
    pub rank: usize,
    /// Smallest accepted singular value (None when rank = 0).
    pub sigma_accept: Option<R>,
    /// Largest rejected singular value (None when full rank).
    pub sigma_reject: Option<R>,
    pub cutoff: R,
}

impl<R: Real> RankGap<R> {
    /// A decision is shaky when a singular value lies within one decade of
    /// the cutoff on either side.
    pub fn is_marginal(&self) -> bool {
        let decade = R::of(10.0);
        let near = |s: R| s > self.cutoff / decade && s < self.cutoff * decade;
        self.sigma_accept.is_some_and(near) || self.sigma_reject.is_some_and(near)
    }
}

/// One audited definiteness decision.
#[derive(Debug, Clone, Serialize)]
pub struct DefinitenessMargin<R: Real> {
    pub context: String,
    pub min_eigenvalue: R,
    pub threshold: R,
    pub decided_definite: bool,
}

impl<R: Real> DefinitenessMargin<R> {
    pub fn is_marginal(&self) -> bool {
        let decade = R::of(10.0);
        let near_threshold = self.min_eigenvalue > self.threshold / decade
            && self.min_eigenvalue < self.threshold * decade;
        // Positive but below the pinned tolerance: decided either way, the
        // call rests on resolution finer than tol_psd.
        let sub_tolerance_positive =
            self.min_eigenvalue > R::zero() && self.min_eigenvalue <= self.threshold;
        near_threshold || sub_tolerance_positive
    }
}

/// Trichotomy for tolerance-based definiteness calls.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Definiteness {
    Definite,
    Indeterminate,
    NotDefinite,
}

/// A = (A + A^H)/2 + (A - A^H)/2.
pub fn hermitian_split<R: Real>(a: &CMatrix<R>) -> Result<HermitianSplit<R>> {
    a.check_square_finite("hermitian_split input")?;
    Ok(HermitianSplit {
        h: a.hermitian_part(),
        s: a.skew_part(),
    })
}

/// Polar decomposition through the SVD: A = W Sigma V^H gives U = W V^H,
/// P = W Sigma W^H, Q = V Sigma V^H.
pub fn polar_decompose<R: Real>(a: &CMatrix<R>, tol: &Tolerances<R>) -> Result<PolarFactors<R>> {
    a.check_square_finite("polar_decompose input")?;
    let n = a.nrows();
    let f = svd(a)?;
    let u = &f.u * &f.v.adjoint();
    let sig = CMatrix::real_diagonal(&f.sigma);
    let p = (&(&f.u * &sig) * &f.u.adjoint()).symmetrize();
    let q = (&(&f.v * &sig) * &f.v.adjoint()).symmetrize();
    let sigma_max = f.sigma.first().copied().unwrap_or(R::zero());
    let cutoff = tol.rank_cutoff(n) * sigma_max;
    let unitary_not_unique = f.sigma.iter().any(|&s| s <= cutoff);
    Ok(PolarFactors {
        p,
        u,
        q,
        unitary_not_unique,
    })
}

/// Count of singular values above the relative cutoff; zero matrix has rank 0.
pub fn numerical_rank<R: Real>(m: &CMatrix<R>, tol: &Tolerances<R>) -> Result<usize> {
    Ok(numerical_rank_audited(m, tol, "numerical_rank")?.rank)
}

/// Rank of a matrix derived from larger expressions: the cutoff is taken
/// relative to `max(sigma_1, scale_floor)` so that a noise-level residual of
/// an O(scale) computation reads as zero instead of full rank.
pub fn numerical_rank_floored<R: Real>(
    m: &CMatrix<R>,
    tol: &Tolerances<R>,
    scale_floor: R,
) -> Result<usize> {
    Ok(rank_gap(m, tol, scale_floor, "numerical_rank_floored")?.rank)
}

pub fn numerical_rank_audited<R: Real>(
    m: &CMatrix<R>,
    tol: &Tolerances<R>,
    context: &str,
) -> Result<RankGap<R>> {
    rank_gap(m, tol, R::zero(), context)
}

fn rank_gap<R: Real>(
    m: &CMatrix<R>,
    tol: &Tolerances<R>,
    scale_floor: R,
    context: &str,
) -> Result<RankGap<R>> {
    if !m.is_finite() {
        return Err(Error::InvalidInput(format!(
            "{context}: non-finite entries"
        )));
    }
    let sig = singular_values(m)?;
    let sigma1 = sig.first().copied().unwrap_or(R::zero());
    let cutoff = tol.rank_cutoff(m.nrows()) * sigma1.max(scale_floor);
    let rank = if sigma1 == R::zero() {
        0
    } else {
        sig.iter().take_while(|&&s| s > cutoff).count()
    };
    Ok(RankGap {
        context: context.to_string(),
        rank,
        sigma_accept: if rank > 0 { Some(sig[rank - 1]) } else { None },
        sigma_reject: sig.get(rank).copied(),
        cutoff,
    })
}

/// Hermitian PSD square root; near-zero negative eigenvalues are clamped.
pub fn matrix_sqrt_psd<R: Real>(m: &CMatrix<R>, tol: &Tolerances<R>) -> Result<CMatrix<R>> {
    m.check_square_finite("matrix_sqrt_psd input")?;
    let scale = m.max_abs().max(R::min_positive_value());
    if m.hermitian_defect() > tol.tol_sym * scale {
        return Err(Error::Domain(
            "matrix_sqrt_psd requires a Hermitian matrix".into(),
        ));
    }
    psd_sqrt(&m.symmetrize(), tol.tol_psd * scale)
}

/// e^{A t} via scaling-and-squaring.
pub fn matrix_exponential<R: Real>(a: &CMatrix<R>, t: R) -> Result<CMatrix<R>> {
    a.check_square_finite("matrix_exponential input")?;
    if !t.is_finite() {
        return Err(Error::InvalidInput("non-finite time".into()));
    }
    expm(&a.scale_real(t))
}

/// Eigenvalues with semisimplicity flags, singular values, and the four
/// summary scalars (alpha, mu, rho, sigma_max).
pub fn spectral_quantities<R: Real>(
    a: &CMatrix<R>,
    tol: &Tolerances<R>,
) -> Result<(SpectralData<R>, SpectralSummary<R>)> {
    a.check_square_finite("spectral_quantities input")?;
    let n = a.nrows();
    let eigenvalues = schur::eigenvalues(a)?;
    let sing = singular_values(a)?;

    // Computed eigenvalues of a defective 2-block spread by about
    // sqrt(eps); the semisimplicity clustering must be at least that wide
    // or the pair falls into separate "simple" clusters.
    let scale = R::one().max(a.max_abs());
    let cluster_tol = R::of(EIG_CLUSTER_TOL).max(R::of(32.0) * R::epsilon().sqrt() * scale);
    let clusters = cluster_complex(&eigenvalues, cluster_tol);
    let mut semisimple_flags = vec![true; n];
    // Singletons get the rank test only near a stability boundary
    // (imaginary axis or unit circle), where the flag drives decisions;
    // defective blocks deeper than 2 escape the cluster band but leave
    // A - lambda I visibly nonsingular there.
    let boundary_band = R::of(1e-2) * scale;
    let near_boundary = |l: &Cx<R>| {
        l.re.abs() <= boundary_band || (l.norm() - R::one()).abs() <= boundary_band
    };
    for (repr, members) in &clusters {
        if members.len() < 2 && !near_boundary(repr) {
            continue;
        }
        // Kernel directions are counted against the cluster spread: members
        // sit at distance up to `radius` from the representative, so their
        // eigendirections contribute singular values of that size.
        let radius = members
            .iter()
            .map(|&idx| (eigenvalues[idx] - *repr).norm())
            .fold(R::zero(), R::max);
        let shifted = crate::matrix::shift_identity(a, -*repr);
        let sig = singular_values(&shifted)?;
        let sigma1 = sig.first().copied().unwrap_or(R::zero());
        let threshold = (tol.rank_cutoff(n) * sigma1).max(radius + radius);
        let geometric = sig.iter().filter(|&&s| s <= threshold).count();
        let semisimple = geometric >= members.len();
        for &idx in members {
            semisimple_flags[idx] = semisimple;
        }
    }

    let alpha = eigenvalues
        .iter()
        .map(|l| l.re)
        .fold(R::neg_infinity(), R::max);
    let rho = eigenvalues.iter().map(|l| l.norm()).fold(R::zero(), R::max);
    let herm = a.hermitian_part();
    let mu = *hermitian_eigen(&herm)?
        .values
        .last()
        .ok_or_else(|| Error::InvalidInput("empty matrix".into()))?;
    let sigma_max = sing.first().copied().unwrap_or(R::zero());

    Ok((
        SpectralData {
            eigenvalues,
            semisimple_flags,
            singular_values: sing,
        },
        SpectralSummary {
            alpha,
            mu,
            rho,
            sigma_max,
        },
    ))
}

/// Definiteness of a Hermitian matrix with the relative margin `tol_psd`:
/// definite when the smallest eigenvalue clears +threshold, not definite
/// below -threshold, indeterminate in between.
pub fn definiteness<R: Real>(
    m: &CMatrix<R>,
    tol: &Tolerances<R>,
    context: &str,
) -> Result<(Definiteness, DefinitenessMargin<R>)> {
    definiteness_floored(m, tol, R::zero(), context)
}

/// Definiteness with a scale floor for matrices derived from larger
/// expressions (e.g. the Hermitian part of a nearly skew matrix).
pub fn definiteness_floored<R: Real>(
    m: &CMatrix<R>,
    tol: &Tolerances<R>,
    scale_floor: R,
    context: &str,
) -> Result<(Definiteness, DefinitenessMargin<R>)> {
    let sym = m.symmetrize();
    let scale = sym.max_abs().max(scale_floor).max(R::min_positive_value());
    let threshold = tol.tol_psd * scale;
    let eig = hermitian_eigen(&sym)?;
    let min = eig.values[0];
    let call = if min > threshold {
        Definiteness::Definite
    } else if min < -threshold {
        Definiteness::NotDefinite
    } else {
        Definiteness::Indeterminate
    };
    Ok((
        call,
        DefinitenessMargin {
            context: context.to_string(),
            min_eigenvalue: min,
            threshold,
            decided_definite: call == Definiteness::Definite,
        },
    ))
}

/// Is the Hermitian matrix PSD within the tolerance margin?
pub fn is_psd<R: Real>(m: &CMatrix<R>, tol: &Tolerances<R>) -> Result<bool> {
    is_psd_floored(m, tol, R::zero())
}

/// PSD test with a derived-scale floor in the margin.
pub fn is_psd_floored<R: Real>(m: &CMatrix<R>, tol: &Tolerances<R>, scale_floor: R) -> Result<bool> {
    let sym = m.symmetrize();
    let scale = sym.max_abs().max(scale_floor).max(R::min_positive_value());
    let eig = hermitian_eigen(&sym)?;
    Ok(eig.values[0] >= -tol.tol_psd * scale)
}

/// Definiteness call for Gram matrices inside index searches. Gram data is
/// quadratic in the underlying Krylov blocks, so an exactly-positive smallest
/// eigenvalue may fall below the pinned `tol_psd`; it is still certified as
/// long as it clears the eigensolver noise floor, and the audit records the
/// sub-tolerance margin.
pub fn gram_definiteness<R: Real>(
    m: &CMatrix<R>,
    tol: &Tolerances<R>,
    context: &str,
) -> Result<(Definiteness, DefinitenessMargin<R>)> {
    let (call, mut margin) = definiteness(m, tol, context)?;
    if call == Definiteness::Indeterminate {
        let n = m.nrows().max(1);
        let scale = m.max_abs().max(R::min_positive_value());
        let noise_floor = R::epsilon() * R::of_usize(64 * n) * scale;
        if margin.min_eigenvalue > noise_floor {
            margin.decided_definite = true;
            return Ok((Definiteness::Definite, margin));
        }
    }
    Ok((call, margin))
}

/// Result of the dual minimal-index search.
#[derive(Debug, Clone, Serialize)]
pub struct MinIndexResult<R: Real> {
    pub m_rank: Option<usize>,
    pub m_gram: Option<usize>,
    pub rank_audit: Vec<RankGap<R>>,
    pub gram_audit: Vec<DefinitenessMargin<R>>,
}

/// Smallest m <= m_max with rank[D, CD, ..., C^m D] = n (rank route) and with
/// sum_j C^j D (C^H)^j positive definite (Gram route). The two are equivalent
/// for PSD D; both are computed so callers can cross-check.
pub fn min_index_rank_vs_gram<R: Real>(
    d: &CMatrix<R>,
    c: &CMatrix<R>,
    m_max: usize,
    tol: &Tolerances<R>,
) -> Result<MinIndexResult<R>> {
    d.check_square_finite("min_index D")?;
    c.check_square_finite("min_index C")?;
    let n = d.nrows();
    if c.nrows() != n {
        return Err(Error::InvalidInput(
            "min_index: D and C must have the same dimension".into(),
        ));
    }
    let scale = d.max_abs().max(R::min_positive_value());
    if d.hermitian_defect() > tol.tol_sym * scale {
        return Err(Error::Domain("min_index: D must be Hermitian".into()));
    }
    if !is_psd(d, tol)? {
        return Err(Error::Domain(
            "min_index: D must be positive semi-definite".into(),
        ));
    }

    let mut m_rank = None;
    let mut rank_audit = Vec::new();
    let mut block = d.clone();
    let mut power_d = d.clone();
    for m in 0..=m_max {
        if m > 0 {
            power_d = c * &power_d;
            block = block.hcat(&power_d);
        }
        let gap = numerical_rank_audited(&block, tol, &format!("rank route, m = {m}"))?;
        let full = gap.rank == n;
        rank_audit.push(gap);
        if full {
            m_rank = Some(m);
            break;
        }
    }

    let mut m_gram = None;
    let mut gram_audit = Vec::new();
    let d_sym = d.symmetrize();
    let mut term = d_sym.clone();
    let mut total = d_sym.clone();
    let ch = c.adjoint();
    for m in 0..=m_max {
        if m > 0 {
            term = &(c * &term) * &ch;
            total = &total + &term;
        }
        let (call, margin) = gram_definiteness(&total, tol, &format!("Gram route, m = {m}"))?;
        gram_audit.push(margin);
        if call == Definiteness::Definite {
            m_gram = Some(m);
            break;
        }
    }

    Ok(MinIndexResult {
        m_rank,
        m_gram,
        rank_audit,
        gram_audit,
    })
}

/// The agreed value of both routes, or an indeterminate/internal error when
/// they disagree. Marginal audits downgrade the failure to indeterminate.
pub fn reconcile_min_index<R: Real>(result: &MinIndexResult<R>, context: &str) -> Result<Option<usize>> {
    match (result.m_rank, result.m_gram) {
        (a, b) if a == b => Ok(a),
        (a, b) => {
            let marginal = result.rank_audit.iter().any(|g| g.is_marginal())
                || result.gram_audit.iter().any(|g| g.is_marginal());
            let candidates: Vec<usize> = [a, b].iter().filter_map(|x| *x).collect();
            if marginal {
                Err(Error::Indeterminate {
                    context: format!("{context}: rank and Gram routes disagree near tolerance"),
                    candidates,
                })
            } else {
                Err(Error::Internal(format!(
                    "{context}: rank route gave {a:?}, Gram route gave {b:?}"
                )))
            }
        }
    }
}

/// Spectral norm helper used across modules.
pub fn spectral_norm<R: Real>(a: &CMatrix<R>) -> Result<R> {
    crate::linalg::svd::spectral_norm(a)
}

/// Orthonormal basis of the numerical kernel of a matrix.
pub fn kernel_basis<R: Real>(m: &CMatrix<R>, tol: &Tolerances<R>) -> Result<CMatrix<R>> {
    kernel_basis_floored(m, tol, R::zero())
}

/// Kernel basis with the derived-scale floor of [`numerical_rank_floored`].
pub fn kernel_basis_floored<R: Real>(
    m: &CMatrix<R>,
    tol: &Tolerances<R>,
    scale_floor: R,
) -> Result<CMatrix<R>> {
    let sig1 = singular_values(m)?.first().copied().unwrap_or(R::zero());
    let cutoff = tol.rank_cutoff(m.nrows()) * sig1.max(scale_floor);
    crate::linalg::subspace::kernel_basis(m, cutoff)
}

/// Orthonormal eigenvector basis of a Hermitian matrix for the eigenvalue
/// cluster containing `target` (within the clustering tolerance).
pub fn hermitian_eigenspace<R: Real>(
    m: &CMatrix<R>,
    target: R,
) -> Result<CMatrix<R>> {
    let eig = hermitian_eigen(&m.symmetrize())?;
    let tol = R::of(EIG_CLUSTER_TOL) * (R::one() + m.max_abs());
    let indices: Vec<usize> = eig
        .values
        .iter()
        .enumerate()
        .filter(|(_, &v)| (v - target).abs() <= tol)
        .map(|(i, _)| i)
        .collect();
    Ok(crate::linalg::subspace::select_columns(&eig.vectors, &indices))
}

pub fn complex_to_matrix<R: Real>(re_im: &[(R, R)], n: usize) -> CMatrix<R> {
    CMatrix::from_fn(n, n, |i, j| {
        let (re, im) = re_im[i * n + j];
        cx(re, im)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;

    fn tol() -> Tolerances<f64> {
        Tolerances::default()
    }

    #[test]
    fn split_indefinite_spiral_generator() {
        // A with Hermitian part diag(-3, 1); eigenvalue set {-3, 1}.
        let a = CMatrix::from_real_rows(&[&[-3.0_f64, -3.0], &[3.0, 1.0]]);
        let split = hermitian_split(&a).unwrap();
        let expect_h = CMatrix::from_real_rows(&[&[-3.0_f64, 0.0], &[0.0, 1.0]]);
        let expect_s = CMatrix::from_real_rows(&[&[0.0_f64, -3.0], &[3.0, 0.0]]);
        assert!((&split.h - &expect_h).max_abs() < 1e-15);
        assert!((&split.s - &expect_s).max_abs() < 1e-15);
        let eig = hermitian_eigen(&split.h).unwrap();
        assert!((eig.values[0] + 3.0).abs() < 1e-14);
        assert!((eig.values[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn split_identity_and_shear() {
        let id = CMatrix::<f64>::identity(3);
        let s = hermitian_split(&id).unwrap();
        assert!((&s.h - &id).max_abs() < 1e-16);
        assert!(s.s.max_abs() < 1e-16);

        let a = CMatrix::from_real_rows(&[&[1.0_f64, -1.0], &[1.0, 0.0]]);
        let split = hermitian_split(&a).unwrap();
        assert!((&split.h - &CMatrix::from_real_rows(&[&[1.0_f64, 0.0], &[0.0, 0.0]])).max_abs() < 1e-15);
        assert!((&split.s - &CMatrix::from_real_rows(&[&[0.0_f64, -1.0], &[1.0, 0.0]])).max_abs() < 1e-15);
        assert!((&(&split.h + &split.s) - &a).max_abs() < 1e-15);
    }

    #[test]
    fn split_rejects_bad_input() {
        let rect = CMatrix::<f64>::zeros(2, 3);
        assert!(matches!(
            hermitian_split(&rect),
            Err(Error::InvalidInput(_))
        ));
        let empty = CMatrix::<f64>::zeros(0, 0);
        assert!(matches!(
            hermitian_split(&empty),
            Err(Error::InvalidInput(_))
        ));
        let mut nan = CMatrix::<f64>::identity(2);
        nan[(0, 0)] = cx(f64::NAN, 0.0);
        assert!(hermitian_split(&nan).is_err());
    }

    #[test]
    fn polar_diagonal_and_unitary() {
        let a = CMatrix::from_real_rows(&[&[2.0_f64, 0.0], &[0.0, 3.0]]);
        let f = polar_decompose(&a, &tol()).unwrap();
        assert!((&f.p - &a).max_abs() < 1e-14);
        assert!((&f.q - &a).max_abs() < 1e-14);
        assert!((&f.u - &CMatrix::identity(2)).max_abs() < 1e-14);
        assert!(!f.unitary_not_unique);

        let rot = CMatrix::from_real_rows(&[&[0.0_f64, -1.0], &[1.0, 0.0]]);
        let f = polar_decompose(&rot, &tol()).unwrap();
        assert!((&f.p - &CMatrix::identity(2)).max_abs() < 1e-14);
        assert!((&f.q - &CMatrix::identity(2)).max_abs() < 1e-14);
        assert!((&f.u - &rot).max_abs() < 1e-14);
    }

    #[test]
    fn polar_upper_shift_flags_nonuniqueness() {
        let shift =
            CMatrix::from_real_rows(&[&[0.0_f64, 1.0, 0.0], &[0.0, 0.0, 1.0], &[0.0, 0.0, 0.0]]);
        let f = polar_decompose(&shift, &tol()).unwrap();
        // A^H A = diag(0, 1, 1), so Q = diag(0, 1, 1).
        let expect_q = CMatrix::from_real_rows(&[&[0.0_f64, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]]);
        assert!((&f.q - &expect_q).max_abs() < 1e-13);
        assert!(f.unitary_not_unique);
        assert!((&(&f.u * &f.q) - &shift).max_abs() < 1e-13);
        assert!((&(&f.p * &f.u) - &shift).max_abs() < 1e-13);
        // P^2 = A A^H and Q^2 = A^H A.
        assert!((&(&f.p * &f.p) - &(&shift * &shift.adjoint())).max_abs() < 1e-13);
        assert!((&(&f.q * &f.q) - &(&shift.adjoint() * &shift)).max_abs() < 1e-13);
    }

    #[test]
    fn rank_cases() {
        let zero = CMatrix::<f64>::zeros(2, 4);
        assert_eq!(numerical_rank(&zero, &tol()).unwrap(), 0);
        assert_eq!(numerical_rank(&CMatrix::<f64>::identity(5), &tol()).unwrap(), 5);
        // [diag(1,0), S diag(1,0)] with S the quarter-turn: spans C^2.
        let d = CMatrix::from_real_rows(&[&[1.0_f64, 0.0], &[0.0, 0.0]]);
        let s = CMatrix::from_real_rows(&[&[0.0_f64, -1.0], &[1.0, 0.0]]);
        let block = d.hcat(&(&s * &d));
        assert_eq!(numerical_rank(&block, &tol()).unwrap(), 2);
    }

    #[test]
    fn sqrt_psd_examples() {
        let m = CMatrix::from_real_rows(&[&[4.0_f64, 0.0], &[0.0, 9.0]]);
        let r = matrix_sqrt_psd(&m, &tol()).unwrap();
        assert!((&r - &CMatrix::from_real_rows(&[&[2.0_f64, 0.0], &[0.0, 3.0]])).max_abs() < 1e-14);

        let id = CMatrix::<f64>::identity(4);
        assert!((&matrix_sqrt_psd(&id, &tol()).unwrap() - &id).max_abs() < 1e-14);

        // Eigenvalues 1 and 3; root squares back to 1e-12.
        let m = CMatrix::from_real_rows(&[&[2.0_f64, -1.0], &[-1.0, 2.0]]);
        let r = matrix_sqrt_psd(&m, &tol()).unwrap();
        assert!((&(&r * &r) - &m).max_abs() < 1e-12);
        let eig = hermitian_eigen(&r).unwrap();
        assert!((eig.values[0] - 1.0).abs() < 1e-12);
        assert!((eig.values[1] - 3.0_f64.sqrt()).abs() < 1e-12);

        let not_herm = CMatrix::from_real_rows(&[&[1.0_f64, 1.0], &[0.0, 1.0]]);
        assert!(matches!(matrix_sqrt_psd(&not_herm, &tol()), Err(Error::Domain(_))));
        let not_psd = CMatrix::from_real_rows(&[&[-1.0_f64, 0.0], &[0.0, 1.0]]);
        assert!(matches!(matrix_sqrt_psd(&not_psd, &tol()), Err(Error::Domain(_))));
    }

    #[test]
    fn exponential_examples() {
        let zero = CMatrix::<f64>::zeros(3, 3);
        for t in [0.0, 0.5, 2.0] {
            let e = matrix_exponential(&zero, t).unwrap();
            assert!((&e - &CMatrix::identity(3)).max_abs() < 1e-15);
        }
        let a = CMatrix::from_real_rows(&[&[-1.0_f64, 0.0], &[0.0, -2.0]]);
        let e = matrix_exponential(&a, 1.0).unwrap();
        assert!((e[(0, 0)].re - (-1.0_f64).exp()).abs() < 1e-14);
        assert!((e[(1, 1)].re - (-2.0_f64).exp()).abs() < 1e-14);

        let rot = CMatrix::from_real_rows(&[&[0.0_f64, -1.0], &[1.0, 0.0]]);
        let quarter = matrix_exponential(&rot, std::f64::consts::FRAC_PI_2).unwrap();
        assert!((&quarter - &rot).max_abs() < 1e-14);
    }

    #[test]
    fn spectral_summary_values() {
        // -B for B = [[3,3],[-3,-1]]: eigenvalues -1 +- i sqrt(5), mu = 1.
        let a = CMatrix::from_real_rows(&[&[-3.0_f64, -3.0], &[3.0, 1.0]]);
        let (_, summary) = spectral_quantities(&a, &tol()).unwrap();
        assert!((summary.alpha + 1.0).abs() < 1e-12);
        assert!((summary.mu - 1.0).abs() < 1e-12);
        assert!(summary.alpha <= summary.mu + 1e-10);

        let skew = CMatrix::diagonal(&[cx(0.0_f64, 1.0), cx(0.0, -1.0)]);
        let (data, summary) = spectral_quantities(&skew, &tol()).unwrap();
        assert!(summary.alpha.abs() < 1e-12);
        assert!(summary.mu.abs() < 1e-12);
        assert!((summary.rho - 1.0).abs() < 1e-12);
        assert!((summary.sigma_max - 1.0).abs() < 1e-12);
        assert!(data.semisimple_flags.iter().all(|&f| f));

        // alpha * [[1,-2],[0,-1]] at alpha = 1/2: rho = 1/2, sigma_max = (1+sqrt(2))/2.
        let a = CMatrix::from_real_rows(&[&[0.5_f64, -1.0], &[0.0, -0.5]]);
        let (_, summary) = spectral_quantities(&a, &tol()).unwrap();
        assert!((summary.rho - 0.5).abs() < 1e-12);
        assert!((summary.sigma_max - (1.0 + 2.0_f64.sqrt()) / 2.0).abs() < 1e-12);
        assert!(summary.rho <= summary.sigma_max + 1e-10);
    }

    #[test]
    fn scalar_matrices_work_end_to_end() {
        let a = CMatrix::from_real_rows(&[&[-2.0_f64]]);
        let (data, summary) = spectral_quantities(&a, &tol()).unwrap();
        assert_eq!(data.eigenvalues.len(), 1);
        assert!((summary.alpha + 2.0).abs() < 1e-14);
        assert!((summary.sigma_max - 2.0).abs() < 1e-14);
        let r = crate::coercivity::hc_index(&CMatrix::from_real_rows(&[&[3.0_f64]]), &tol()).unwrap();
        assert_eq!(r.m_hc, Some(0));
        let d = crate::contractivity::dhc_index(&CMatrix::from_real_rows(&[&[0.5_f64]]), &tol()).unwrap();
        assert_eq!(d.m_dhc, Some(0));
    }

    #[test]
    fn jordan_block_not_semisimple() {
        let a = CMatrix::from_real_rows(&[&[0.0_f64, 1.0], &[0.0, 0.0]]);
        let (data, _) = spectral_quantities(&a, &tol()).unwrap();
        assert!(data.semisimple_flags.iter().all(|&f| !f));
    }

    #[test]
    fn min_index_examples() {
        // D already full rank: both routes say 0.
        let d = CMatrix::<f64>::identity(3);
        let c = CMatrix::from_real_rows(&[&[0.0_f64, 1.0, 0.0], &[0.0, 0.0, 1.0], &[1.0, 0.0, 0.0]]);
        let r = min_index_rank_vs_gram(&d, &c, 2, &tol()).unwrap();
        assert_eq!(r.m_rank, Some(0));
        assert_eq!(r.m_gram, Some(0));

        // Quarter-turn stepping a rank-1 projector: index 1.
        let d = CMatrix::from_real_rows(&[&[1.0_f64, 0.0], &[0.0, 0.0]]);
        let c = CMatrix::from_real_rows(&[&[0.0_f64, -1.0], &[1.0, 0.0]]);
        let r = min_index_rank_vs_gram(&d, &c, 1, &tol()).unwrap();
        assert_eq!(r.m_rank, Some(1));
        assert_eq!(r.m_gram, Some(1));

        // Lower shift stepping diag(1,0,0): index 2.
        let d = CMatrix::from_real_rows(&[&[1.0_f64, 0.0, 0.0], &[0.0, 0.0, 0.0], &[0.0, 0.0, 0.0]]);
        let c = CMatrix::from_real_rows(&[&[0.0_f64, 0.0, 0.0], &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]]);
        let r = min_index_rank_vs_gram(&d, &c, 2, &tol()).unwrap();
        assert_eq!(r.m_rank, Some(2));
        assert_eq!(r.m_gram, Some(2));
        assert_eq!(reconcile_min_index(&r, "test").unwrap(), Some(2));

        // No finite index: D supported on an invariant line of C.
        let d = CMatrix::from_real_rows(&[&[1.0_f64, 0.0], &[0.0, 0.0]]);
        let c = CMatrix::from_real_rows(&[&[1.0_f64, 0.0], &[0.0, 1.0]]);
        let r = min_index_rank_vs_gram(&d, &c, 1, &tol()).unwrap();
        assert_eq!(r.m_rank, None);
        assert_eq!(r.m_gram, None);

        let not_psd = CMatrix::from_real_rows(&[&[-1.0_f64, 0.0], &[0.0, 1.0]]);
        assert!(matches!(
            min_index_rank_vs_gram(&not_psd, &c, 1, &tol()),
            Err(Error::Domain(_))
        ));
    }
}
