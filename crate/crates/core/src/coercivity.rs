//! Continuous-time classification and the hypocoercivity index.
//!
//! The index of an accretive matrix is computed by five independent routes
//! (Kalman rank on the skew part, Gram definiteness, Kalman rank with the
//! full matrix, staircase read-off, and an eigenstructure-driven kernel
//! chain) which must agree exactly; disagreement is an error, never a guess.

use crate::error::{Error, Result};
use crate::linalg::hermitian::{hermitian_eigen, pd_inv_sqrt, psd_sqrt, skew_hermitian_eigen};
use crate::linalg::lu;
use crate::linalg::subspace::{cluster_values, max_overlap, select_columns};
use crate::matcore::{
    self, definiteness, definiteness_floored, hermitian_eigenspace, is_psd_floored,
    kernel_basis_floored, min_index_rank_vs_gram, numerical_rank_floored, spectral_quantities,
    Definiteness, DefinitenessMargin, RankGap, Tolerances, EIG_CLUSTER_TOL,
};
use crate::matrix::{shift_identity, CMatrix};
use crate::scalar::{cx, Cx, Real};
use crate::staircase::{index_from_staircase, staircase_jr};
use serde::Serialize;

/// Everything one wants to know about x' = A x.
#[derive(Debug, Clone, Serialize)]
pub struct ContinuousClassification<R: Real> {
    pub stable: bool,
    pub asymptotically_stable: bool,
    /// Hermitian part negative semi-definite.
    pub semi_dissipative: bool,
    /// Hermitian part negative definite.
    pub dissipative: bool,
    /// -A is accretive (same condition as semi-dissipativity of A).
    pub accretive_negation: bool,
    /// Spectrum in the open left half-plane.
    pub negative_hypocoercive: bool,
    /// Spectral abscissa.
    pub alpha: R,
    /// Logarithmic norm (largest eigenvalue of the Hermitian part).
    pub mu: R,
    /// Tolerance-ambiguous decisions, if any.
    pub indeterminate_notes: Vec<String>,
}

/// One entry of a tolerance audit trail.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind")]
pub enum AuditEntry<R: Real> {
    Rank(RankGap<R>),
    Definiteness(DefinitenessMargin<R>),
}

impl<R: Real> AuditEntry<R> {
    pub fn is_marginal(&self) -> bool {
        match self {
            AuditEntry::Rank(g) => g.is_marginal(),
            AuditEntry::Definiteness(d) => d.is_marginal(),
        }
    }
}

/// Per-method index values; all present entries must agree.
#[derive(Debug, Clone, Serialize)]
pub struct HcPerMethod {
    #[serde(rename = "kalman_BS")]
    pub kalman_bs: Option<usize>,
    #[serde(rename = "gram_BS")]
    pub gram_bs: Option<usize>,
    #[serde(rename = "kalman_fullB")]
    pub kalman_full_b: Option<usize>,
    pub staircase: Option<usize>,
    pub pbh_witness: Option<usize>,
}

impl HcPerMethod {
    pub fn entries(&self) -> [(&'static str, Option<usize>); 5] {
        [
            ("kalman_BS", self.kalman_bs),
            ("gram_BS", self.gram_bs),
            ("kalman_fullB", self.kalman_full_b),
            ("staircase", self.staircase),
            ("pbh_witness", self.pbh_witness),
        ]
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HcIndexResult<R: Real> {
    pub exists: bool,
    pub m_hc: Option<usize>,
    pub per_method: HcPerMethod,
    /// Eigenvector of the skew part inside the kernel of the Hermitian part,
    /// produced when the index does not exist.
    pub witness_vector: Option<Vec<Cx<R>>>,
    pub tolerance_audit: Vec<AuditEntry<R>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ShcIndexResult<R: Real> {
    pub lambda_min_bh: R,
    /// True by construction of the shift.
    pub shifted_matrix_accretive: bool,
    pub exists: bool,
    pub m_shc: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ShcEquivalence<R: Real> {
    pub m_b1: Option<usize>,
    pub m_b2: Option<usize>,
    /// Kalman-style rank condition at every eigenvalue of the skew matrix.
    pub pbh_ok: bool,
    /// No eigenvector of the skew matrix pairs with the minimal eigenvalue
    /// of the Hermitian matrix.
    pub eigvec_ok: bool,
    pub lambda_min: R,
}

#[derive(Debug, Clone, Serialize)]
pub struct InverseIndexCheck {
    pub m_b: usize,
    pub m_binv: usize,
    pub kernel_dims_equal: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ImaginaryAxisTest<R: Real> {
    pub has_imaginary_eigenvalue: bool,
    pub witness: Option<Vec<Cx<R>>>,
}

/// Detection band around the imaginary axis (and around unit modulus in the
/// discrete case), scaled up for matrices with large entries.
pub fn axis_tolerance<R: Real>(a: &CMatrix<R>) -> R {
    R::of(EIG_CLUSTER_TOL) * R::one().max(a.max_abs())
}

pub fn classify_continuous<R: Real>(
    a: &CMatrix<R>,
    tol: &Tolerances<R>,
) -> Result<ContinuousClassification<R>> {
    a.check_square_finite("classify_continuous input")?;
    let (data, summary) = spectral_quantities(a, tol)?;
    let band = axis_tolerance(a);
    let mut notes = Vec::new();

    let mut stable = true;
    for (idx, lambda) in data.eigenvalues.iter().enumerate() {
        if lambda.re > band {
            stable = false;
        } else if lambda.re.abs() <= band && !data.semisimple_flags[idx] {
            stable = false;
        }
    }
    let asymptotically_stable = summary.alpha < -band;
    if summary.alpha.abs() <= band {
        notes.push(format!(
            "spectral abscissa {:e} lies within the imaginary-axis band {:e}",
            summary.alpha, band
        ));
    }

    let herm = a.hermitian_part();
    let neg_herm = -&herm;
    let (semi_call, semi_margin) =
        definiteness_floored(&neg_herm, tol, a.max_abs(), "semi-dissipativity (-A_H)")?;
    // Semi-definite: smallest eigenvalue of -A_H above the negative margin.
    let semi_dissipative = semi_margin.min_eigenvalue >= -semi_margin.threshold;
    let dissipative = semi_call == Definiteness::Definite;
    if semi_call == Definiteness::Indeterminate {
        notes.push(format!(
            "definiteness of the Hermitian part is marginal (min eigenvalue of -A_H = {:e}, threshold {:e})",
            semi_margin.min_eigenvalue, semi_margin.threshold
        ));
    }

    Ok(ContinuousClassification {
        stable,
        asymptotically_stable,
        semi_dissipative,
        dissipative,
        accretive_negation: semi_dissipative,
        negative_hypocoercive: asymptotically_stable,
        alpha: summary.alpha,
        mu: summary.mu,
        indeterminate_notes: notes,
    })
}

/// Reconcile per-method values: unanimous answers pass through; split
/// answers raise indeterminate (when any audited decision was marginal) or
/// an internal consistency error.
pub fn reconcile_methods(
    context: &str,
    entries: &[(&str, Option<usize>)],
    any_marginal: bool,
) -> Result<Option<usize>> {
    let first = entries[0].1;
    if entries.iter().all(|(_, v)| *v == first) {
        return Ok(first);
    }
    let candidates: Vec<usize> = {
        let mut c: Vec<usize> = entries.iter().filter_map(|(_, v)| *v).collect();
        c.sort_unstable();
        c.dedup();
        c
    };
    let detail = entries
        .iter()
        .map(|(name, v)| format!("{name}={v:?}"))
        .collect::<Vec<_>>()
        .join(", ");
    if any_marginal {
        Err(Error::Indeterminate {
            context: format!("{context}: methods disagree near tolerance ({detail})"),
            candidates,
        })
    } else {
        Err(Error::Internal(format!(
            "{context}: method disagreement ({detail})"
        )))
    }
}

/// Hypocoercivity index of an accretive matrix, five ways.
pub fn hc_index<R: Real>(b: &CMatrix<R>, tol: &Tolerances<R>) -> Result<HcIndexResult<R>> {
    b.check_square_finite("hc_index input")?;
    let n = b.nrows();
    let herm = b.hermitian_part();
    let skew = b.skew_part();
    if !is_psd_floored(&herm, tol, b.max_abs())? {
        return Err(Error::Precondition(
            "hc_index requires an accretive matrix (Hermitian part PSD); \
             use shifted_hc_index for general matrices"
                .into(),
        ));
    }
    let m_max = n.saturating_sub(1);
    let mut audit: Vec<AuditEntry<R>> = Vec::new();

    // Routes 1 and 2: Kalman rank and Gram definiteness driven by the skew part.
    let skew_routes = min_index_rank_vs_gram(&herm, &skew, m_max, tol)?;
    audit.extend(skew_routes.rank_audit.iter().cloned().map(AuditEntry::Rank));
    audit.extend(
        skew_routes
            .gram_audit
            .iter()
            .cloned()
            .map(AuditEntry::Definiteness),
    );

    // Route 3: Kalman rank driven by the full matrix.
    let full_routes = min_index_rank_vs_gram(&herm, b, m_max, tol)?;
    audit.extend(full_routes.rank_audit.iter().cloned().map(AuditEntry::Rank));

    // Route 4: staircase read-off (skipped for a vanishing Hermitian part,
    // where no finite index can exist).
    let staircase_m = if herm.max_abs() <= b.max_abs().max(R::min_positive_value()) * tol.tol_psd {
        None
    } else {
        let form = staircase_jr(&skew, &herm, tol)?;
        audit.extend(form.rank_audit.iter().cloned().map(AuditEntry::Rank));
        index_from_staircase(&form).index
    };

    // Route 5: kernel-chain compression along the eigenstructure route.
    let chain_m = kernel_chain_index(&herm, &skew, m_max, tol)?;

    let per_method = HcPerMethod {
        kalman_bs: skew_routes.m_rank,
        gram_bs: skew_routes.m_gram,
        kalman_full_b: full_routes.m_rank,
        staircase: staircase_m,
        pbh_witness: chain_m,
    };
    let any_marginal = audit.iter().any(|e| e.is_marginal());
    let m_hc = reconcile_methods("hc_index", &per_method.entries(), any_marginal)?;

    let witness_vector = if m_hc.is_none() {
        skew_eigvec_in_kernel(&skew, &herm, tol)?
    } else {
        None
    };

    Ok(HcIndexResult {
        exists: m_hc.is_some(),
        m_hc,
        per_method,
        witness_vector,
        tolerance_audit: audit,
    })
}

/// Smallest m with the iterated kernels of H, H S, ..., H S^m intersecting
/// trivially; None if the intersection stays nontrivial through m_max.
fn kernel_chain_index<R: Real>(
    herm: &CMatrix<R>,
    skew: &CMatrix<R>,
    m_max: usize,
    tol: &Tolerances<R>,
) -> Result<Option<usize>> {
    let n = herm.nrows();
    // The index is invariant under positive scaling of either part.
    let h_norm = crate::linalg::svd::spectral_norm(herm)?;
    let s_norm = crate::linalg::svd::spectral_norm(skew)?;
    let h = if h_norm > R::zero() {
        herm.scale_real(R::one() / h_norm)
    } else {
        herm.clone()
    };
    let s = if s_norm > R::zero() {
        skew.scale_real(R::one() / s_norm)
    } else {
        skew.clone()
    };

    let cutoff_unit = tol.rank_cutoff(n);
    let mut basis = kernel_basis_floored(&h, tol, R::one())?;
    if basis.ncols() == 0 {
        return Ok(Some(0));
    }
    let mut s_power = CMatrix::identity(n);
    for m in 1..=m_max {
        s_power = &s * &s_power;
        let constrained = &(&h * &s_power) * &basis;
        let sig = crate::linalg::svd::singular_values(&constrained)?;
        let lead = sig.first().copied().unwrap_or(R::zero());
        let cut = cutoff_unit * lead.max(R::one());
        let keep = crate::linalg::subspace::kernel_basis(&constrained, cut)?;
        if keep.ncols() == 0 {
            return Ok(Some(m));
        }
        basis = &basis * &keep;
    }
    Ok(None)
}

/// Search the eigenspaces of the skew part for a vector inside the kernel of
/// the Hermitian part; returns it when found.
fn skew_eigvec_in_kernel<R: Real>(
    skew: &CMatrix<R>,
    herm: &CMatrix<R>,
    tol: &Tolerances<R>,
) -> Result<Option<Vec<Cx<R>>>> {
    let scale = herm.max_abs().max(skew.max_abs());
    let kernel = kernel_basis_floored(herm, tol, scale)?;
    if kernel.ncols() == 0 {
        return Ok(None);
    }
    let eig = skew_hermitian_eigen(skew)?;
    let band = R::of(EIG_CLUSTER_TOL) * R::one().max(skew.max_abs());
    for (_, members) in cluster_values(&eig.values, band) {
        let eigenspace = select_columns(&eig.vectors, &members);
        let (overlap, witness) = max_overlap(&eigenspace, &kernel)?;
        if overlap >= R::one() - R::of(EIG_CLUSTER_TOL) {
            return Ok(witness);
        }
    }
    Ok(None)
}

/// Does any eigenvector of the skew part live in the given Hermitian
/// eigenspace? Used by the shift criterion.
fn skew_eigvec_in_subspace<R: Real>(skew: &CMatrix<R>, subspace: &CMatrix<R>) -> Result<bool> {
    if subspace.ncols() == 0 {
        return Ok(false);
    }
    let eig = skew_hermitian_eigen(skew)?;
    let band = R::of(EIG_CLUSTER_TOL) * R::one().max(skew.max_abs());
    for (_, members) in cluster_values(&eig.values, band) {
        let eigenspace = select_columns(&eig.vectors, &members);
        let (overlap, _) = max_overlap(&eigenspace, subspace)?;
        if overlap >= R::one() - R::of(EIG_CLUSTER_TOL) {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Shifted hypocoercivity index: shift by the smallest eigenvalue of the
/// Hermitian part, then compute the plain index of the accretive result.
pub fn shifted_hc_index<R: Real>(b: &CMatrix<R>, tol: &Tolerances<R>) -> Result<ShcIndexResult<R>> {
    b.check_square_finite("shifted_hc_index input")?;
    let herm = b.hermitian_part();
    let eig = hermitian_eigen(&herm)?;
    let lambda_min = eig.values[0];
    let shifted = shift_identity(b, cx(-lambda_min, R::zero()));

    let index = hc_index(&shifted, tol)?;

    // Independent existence criterion: the shift fails to be hypocoercive
    // exactly when some eigenvector of the Hermitian part at lambda_min is
    // also an eigenvector of the skew part.
    let eigenspace = hermitian_eigenspace(&herm, lambda_min)?;
    let blocked = skew_eigvec_in_subspace(&b.skew_part(), &eigenspace)?;
    if blocked == index.exists {
        return Err(Error::Internal(format!(
            "shifted_hc_index: eigenstructure criterion (blocked = {blocked}) contradicts the index computation (exists = {})",
            index.exists
        )));
    }

    Ok(ShcIndexResult {
        lambda_min_bh: lambda_min,
        shifted_matrix_accretive: true,
        exists: index.exists,
        m_shc: index.m_hc,
    })
}

/// The four equivalent finiteness conditions for a skew/Hermitian pair with
/// the spectral shift of the Hermitian matrix, evaluated independently.
pub fn shc_equivalence_check<R: Real>(
    j: &CMatrix<R>,
    r: &CMatrix<R>,
    tol: &Tolerances<R>,
) -> Result<ShcEquivalence<R>> {
    j.check_square_finite("shc_equivalence J")?;
    r.check_square_finite("shc_equivalence R")?;
    let n = j.nrows();
    let scale = j.max_abs().max(r.max_abs()).max(R::min_positive_value());
    if r.hermitian_defect() > tol.tol_sym * scale {
        return Err(Error::Domain("shc_equivalence: R must be Hermitian".into()));
    }
    if j.skew_defect() > tol.tol_sym * scale {
        return Err(Error::Domain(
            "shc_equivalence: J must be skew-Hermitian".into(),
        ));
    }

    let eig = hermitian_eigen(&r.symmetrize())?;
    let lambda_min = eig.values[0];
    let shifted_r = shift_identity(&r.symmetrize(), cx(-lambda_min, R::zero()));

    let routes = min_index_rank_vs_gram(&shifted_r, j, n.saturating_sub(1), tol)?;

    // Rank condition at every eigenvalue of J.
    let skew_eig = skew_hermitian_eigen(j)?;
    let mut pbh_ok = true;
    for &theta in &skew_eig.values {
        let probe = shift_identity(&(-j), cx(R::zero(), theta));
        let block = probe.hcat(&shifted_r);
        if numerical_rank_floored(&block, tol, scale)? < n {
            pbh_ok = false;
            break;
        }
    }

    let eigenspace = hermitian_eigenspace(&r.symmetrize(), lambda_min)?;
    let eigvec_ok = !skew_eigvec_in_subspace(j, &eigenspace)?;

    let finite_rank = routes.m_rank.is_some();
    let finite_gram = routes.m_gram.is_some();
    let consistent = finite_rank == finite_gram
        && finite_rank == pbh_ok
        && finite_rank == eigvec_ok
        && routes.m_rank == routes.m_gram;
    if !consistent {
        let marginal = routes.rank_audit.iter().any(|g| g.is_marginal())
            || routes.gram_audit.iter().any(|g| g.is_marginal());
        let candidates: Vec<usize> = routes.m_rank.into_iter().chain(routes.m_gram).collect();
        if marginal {
            return Err(Error::Indeterminate {
                context: "shc_equivalence: conditions disagree near tolerance".into(),
                candidates,
            });
        }
        return Err(Error::Internal(format!(
            "shc_equivalence: inconsistent conditions (m_B1 = {:?}, m_B2 = {:?}, pbh = {pbh_ok}, eigvec = {eigvec_ok})",
            routes.m_rank, routes.m_gram
        )));
    }

    Ok(ShcEquivalence {
        m_b1: routes.m_rank,
        m_b2: routes.m_gram,
        pbh_ok,
        eigvec_ok,
        lambda_min,
    })
}

/// Index invariance under inversion, checked by direct computation.
pub fn verify_inverse_index<R: Real>(
    b: &CMatrix<R>,
    tol: &Tolerances<R>,
) -> Result<InverseIndexCheck> {
    b.check_square_finite("verify_inverse_index input")?;
    let fwd = hc_index(b, tol)?;
    let m_b = fwd.m_hc.ok_or_else(|| {
        Error::Precondition("verify_inverse_index requires a hypocoercive matrix".into())
    })?;
    let inv = lu::inverse(b)
        .map_err(|e| Error::Precondition(format!("matrix must be invertible: {e}")))?;
    let bwd = hc_index(&inv, tol)?;
    let m_binv = bwd
        .m_hc
        .ok_or_else(|| Error::Internal("inverse lost the finite index".into()))?;
    if m_b != m_binv {
        return Err(Error::Internal(format!(
            "inversion changed the index: {m_b} vs {m_binv}"
        )));
    }
    let dim_fwd = b.nrows() - numerical_rank_floored(&b.hermitian_part(), tol, b.max_abs())?;
    let dim_bwd = inv.nrows() - numerical_rank_floored(&inv.hermitian_part(), tol, inv.max_abs())?;
    Ok(InverseIndexCheck {
        m_b,
        m_binv,
        kernel_dims_equal: dim_fwd == dim_bwd,
    })
}

/// Congruence-scale a matrix into accretive form with a positive definite
/// solution of the Lyapunov matrix inequality: P^{1/2} B P^{-1/2}.
pub fn accretive_transform<R: Real>(
    b: &CMatrix<R>,
    p: &CMatrix<R>,
    tol: &Tolerances<R>,
) -> Result<CMatrix<R>> {
    b.check_square_finite("accretive_transform B")?;
    p.check_square_finite("accretive_transform P")?;
    let n = b.nrows();
    if p.nrows() != n {
        return Err(Error::InvalidInput(
            "accretive_transform: dimension mismatch".into(),
        ));
    }
    let p_scale = p.max_abs().max(R::min_positive_value());
    if p.hermitian_defect() > tol.tol_sym * p_scale {
        return Err(Error::Domain(
            "accretive_transform: P must be Hermitian".into(),
        ));
    }
    let (p_call, _) = definiteness(p, tol, "transform weight P")?;
    if p_call != Definiteness::Definite {
        return Err(Error::Domain(
            "accretive_transform: P must be positive definite".into(),
        ));
    }

    // Lyapunov matrix inequality B^H P + P B >= 0.
    let lyap = &(&b.adjoint() * p) + &(p * b);
    let lyap_eig = hermitian_eigen(&lyap.symmetrize())?;
    let floor = tol.tol_psd * lyap.max_abs().max(b.max_abs() * p_scale * R::of(1e-4));
    if lyap_eig.values[0] < -floor {
        return Err(Error::Precondition(format!(
            "accretive_transform: Lyapunov matrix inequality violated (most negative eigenvalue {:e})",
            lyap_eig.values[0]
        )));
    }

    let p_sym = p.symmetrize();
    let sqrt_p = psd_sqrt(&p_sym, tol.tol_psd * p_scale)?;
    let inv_sqrt_p = pd_inv_sqrt(&p_sym, tol.tol_psd * p_scale)?;
    let transformed = &(&sqrt_p * b) * &inv_sqrt_p;

    let herm_eig = hermitian_eigen(&transformed.hermitian_part())?;
    let scale = transformed.max_abs().max(R::min_positive_value());
    if herm_eig.values[0] < -tol.tol_psd * scale * R::of(10.0) {
        return Err(Error::Internal(format!(
            "accretive_transform produced a non-accretive matrix (min Hermitian eigenvalue {:e})",
            herm_eig.values[0]
        )));
    }
    Ok(transformed)
}

/// Imaginary-axis eigenvalue test for accretive matrices: the spectral test
/// and the structural eigenvector test must agree.
pub fn imaginary_axis_test<R: Real>(
    b: &CMatrix<R>,
    tol: &Tolerances<R>,
) -> Result<ImaginaryAxisTest<R>> {
    b.check_square_finite("imaginary_axis_test input")?;
    let herm = b.hermitian_part();
    if !is_psd_floored(&herm, tol, b.max_abs())? {
        return Err(Error::Precondition(
            "imaginary_axis_test requires an accretive matrix".into(),
        ));
    }
    let eigenvalues = crate::linalg::schur::eigenvalues(b)?;
    let band = axis_tolerance(b);
    let spectral_hit = eigenvalues.iter().any(|l| l.re.abs() <= band);

    let witness = skew_eigvec_in_kernel(&b.skew_part(), &herm, tol)?;
    let structural_hit = witness.is_some();

    if spectral_hit != structural_hit {
        return Err(Error::Internal(format!(
            "imaginary_axis_test: spectral test ({spectral_hit}) disagrees with the eigenvector test ({structural_hit})"
        )));
    }
    Ok(ImaginaryAxisTest {
        has_imaginary_eigenvalue: spectral_hit,
        witness,
    })
}

/// Dimension of the numerical kernel of the Hermitian part; upper bound for
/// the index whenever it exists.
pub fn hermitian_kernel_dim<R: Real>(b: &CMatrix<R>, tol: &Tolerances<R>) -> Result<usize> {
    Ok(b.nrows() - numerical_rank_floored(&b.hermitian_part(), tol, b.max_abs())?)
}

pub use matcore::MinIndexResult;
