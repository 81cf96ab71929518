//! Discrete-time classification and the hypocontractivity index.
//!
//! Six independent routes: Kalman rank and telescoped Gram definiteness on
//! the defect matrix I - A^H A, the same pair of conditions on the polar
//! factors, the staircase read-off, and the power-norm probe. All must
//! agree exactly.

use crate::coercivity::{reconcile_methods, AuditEntry};
use crate::error::{Error, Result};
use crate::linalg::schur::schur;
use crate::linalg::subspace::{cluster_complex, max_overlap, select_columns};
use crate::matcore::{
    gram_definiteness, kernel_basis_floored, min_index_rank_vs_gram, numerical_rank_floored,
    polar_decompose, spectral_quantities, Definiteness, PolarFactors, Tolerances,
    EIG_CLUSTER_TOL,
};
use crate::matrix::CMatrix;
use crate::scalar::{Cx, Real};
use crate::staircase::{index_from_staircase, staircase_uq};
use serde::Serialize;

/// Everything one wants to know about x_{k+1} = A x_k.
#[derive(Debug, Clone, Serialize)]
pub struct DiscreteClassification<R: Real> {
    pub stable: bool,
    pub asymptotically_stable: bool,
    /// Largest singular value at most one.
    pub semi_contractive: bool,
    /// Largest singular value strictly below one.
    pub contractive: bool,
    /// Spectral radius strictly below one.
    pub hypocontractive: bool,
    pub rho: R,
    pub sigma_max: R,
    /// Rank of I - A^H A: distance of A from unitarity.
    pub defect_index: usize,
    pub indeterminate_notes: Vec<String>,
}

/// Per-method index values; all present entries must agree.
#[derive(Debug, Clone, Serialize)]
pub struct DhcPerMethod {
    #[serde(rename = "kalman_D1")]
    pub kalman_d1: Option<usize>,
    #[serde(rename = "gram_D2")]
    pub gram_d2: Option<usize>,
    #[serde(rename = "polar_D1prime")]
    pub polar_d1prime: Option<usize>,
    #[serde(rename = "polar_gram_D2prime")]
    pub polar_gram_d2prime: Option<usize>,
    pub staircase: Option<usize>,
    pub power_norm: Option<usize>,
}

impl DhcPerMethod {
    pub fn entries(&self) -> [(&'static str, Option<usize>); 6] {
        [
            ("kalman_D1", self.kalman_d1),
            ("gram_D2", self.gram_d2),
            ("polar_D1prime", self.polar_d1prime),
            ("polar_gram_D2prime", self.polar_gram_d2prime),
            ("staircase", self.staircase),
            ("power_norm", self.power_norm),
        ]
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DhcIndexResult<R: Real> {
    pub exists: bool,
    pub m_dhc: Option<usize>,
    pub per_method: DhcPerMethod,
    /// Eigenvector of the unitary polar factor inside ker(I - Q) when the
    /// index does not exist.
    pub witness_vector: Option<Vec<Cx<R>>>,
    pub tolerance_audit: Vec<AuditEntry<R>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DshcIndexResult<R: Real> {
    pub sigma_max: R,
    pub exists: bool,
    pub m_dshc: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct UnitModulusTest<R: Real> {
    pub has_unit_modulus_eigenvalue: bool,
    pub witness: Option<Vec<Cx<R>>>,
}

/// Unit-modulus detection band, matching the eigenvalue clustering tolerance.
fn modulus_band<R: Real>() -> R {
    R::of(EIG_CLUSTER_TOL)
}

pub fn classify_discrete<R: Real>(
    a: &CMatrix<R>,
    tol: &Tolerances<R>,
) -> Result<DiscreteClassification<R>> {
    a.check_square_finite("classify_discrete input")?;
    let (data, summary) = spectral_quantities(a, tol)?;
    let band = modulus_band::<R>();
    let mut notes = Vec::new();

    let mut stable = true;
    for (idx, lambda) in data.eigenvalues.iter().enumerate() {
        let modulus = lambda.norm();
        if modulus > R::one() + band {
            stable = false;
        } else if (modulus - R::one()).abs() <= band && !data.semisimple_flags[idx] {
            stable = false;
        }
    }
    let asymptotically_stable = summary.rho < R::one() - band;
    if (summary.rho - R::one()).abs() <= band {
        notes.push(format!(
            "spectral radius {:e} lies within the unit-modulus band {:e}",
            summary.rho, band
        ));
    }

    let semi_contractive = summary.sigma_max <= R::one() + tol.tol_psd;
    if summary.sigma_max > R::one() && semi_contractive {
        notes.push(format!(
            "largest singular value {:e} exceeds one within the tolerance margin",
            summary.sigma_max
        ));
    }
    let contractive = summary.sigma_max < R::one() - tol.tol_psd;
    if (summary.sigma_max - R::one()).abs() <= tol.tol_psd {
        notes.push(format!(
            "largest singular value {:e} is within the contractivity margin of one",
            summary.sigma_max
        ));
    }

    let defect = defect_matrix(a);
    let defect_scale = R::one().max(summary.sigma_max * summary.sigma_max);
    let defect_index = numerical_rank_floored(&defect, tol, defect_scale)?;

    Ok(DiscreteClassification {
        stable,
        asymptotically_stable,
        semi_contractive,
        contractive,
        hypocontractive: asymptotically_stable,
        rho: summary.rho,
        sigma_max: summary.sigma_max,
        defect_index,
        indeterminate_notes: notes,
    })
}

/// I - A^H A.
pub fn defect_matrix<R: Real>(a: &CMatrix<R>) -> CMatrix<R> {
    (&CMatrix::identity(a.nrows()) - &(&a.adjoint() * a)).symmetrize()
}

/// Hypocontractivity index of a semi-contractive matrix, six ways.
pub fn dhc_index<R: Real>(a: &CMatrix<R>, tol: &Tolerances<R>) -> Result<DhcIndexResult<R>> {
    a.check_square_finite("dhc_index input")?;
    let n = a.nrows();
    let sigma_max = crate::linalg::svd::spectral_norm(a)?;
    if sigma_max > R::one() + tol.tol_psd {
        return Err(Error::Precondition(format!(
            "dhc_index requires a semi-contractive matrix (sigma_max = {sigma_max}); \
             use scaled_dhc_index for general matrices"
        )));
    }
    let m_max = n.saturating_sub(1);
    let mut audit: Vec<AuditEntry<R>> = Vec::new();

    let defect = defect_matrix(a);
    let adj = a.adjoint();

    // Route 1: Kalman rank on (I - A^H A, A^H).
    let defect_routes = min_index_rank_vs_gram(&defect, &adj, m_max, tol)?;
    audit.extend(defect_routes.rank_audit.iter().cloned().map(AuditEntry::Rank));

    // Route 2: telescoped Gram D_m = I - (A^H)^{m+1} A^{m+1}.
    let mut gram_d2 = None;
    {
        let mut power = a.clone();
        for m in 0..=m_max {
            if m > 0 {
                power = a * &power;
            }
            let telescoped = (&CMatrix::identity(n) - &(&power.adjoint() * &power)).symmetrize();
            let (call, margin) =
                gram_definiteness(&telescoped, tol, &format!("telescoped Gram, m = {m}"))?;
            audit.push(AuditEntry::Definiteness(margin));
            if call == Definiteness::Definite {
                gram_d2 = Some(m);
                break;
            }
        }
    }

    // Routes 3 and 4: the same conditions built from the polar factors.
    let polar = polar_decompose(a, tol)?;
    let polar_defect = (&CMatrix::identity(n) - &(&polar.q * &polar.q)).symmetrize();
    let polar_routes = min_index_rank_vs_gram(&polar_defect, &polar.u.adjoint(), m_max, tol)?;
    audit.extend(polar_routes.rank_audit.iter().cloned().map(AuditEntry::Rank));
    audit.extend(
        polar_routes
            .gram_audit
            .iter()
            .cloned()
            .map(AuditEntry::Definiteness),
    );

    // Route 5: staircase on the polar pair (a vanishing defect means A is
    // unitary and no finite index exists).
    let staircase_m = if polar_defect.max_abs() <= tol.tol_psd {
        None
    } else {
        let form = staircase_uq(&polar.u, &polar.q, tol)?;
        audit.extend(form.rank_audit.iter().cloned().map(AuditEntry::Rank));
        index_from_staircase(&form).index
    };

    // Route 6: power-norm probe.
    let power_norm = power_norm_index(a, m_max)?;

    let per_method = DhcPerMethod {
        kalman_d1: defect_routes.m_rank,
        gram_d2,
        polar_d1prime: polar_routes.m_rank,
        polar_gram_d2prime: polar_routes.m_gram,
        staircase: staircase_m,
        power_norm,
    };
    let any_marginal = audit.iter().any(|e| e.is_marginal());
    let m_dhc = reconcile_methods("dhc_index", &per_method.entries(), any_marginal)?;

    let witness_vector = if m_dhc.is_none() {
        unitary_eigvec_in_kernel(&polar, tol)?
    } else {
        None
    };

    Ok(DhcIndexResult {
        exists: m_dhc.is_some(),
        m_dhc,
        per_method,
        witness_vector,
        tolerance_audit: audit,
    })
}

/// Index read off the power-norm profile: the last power with norm one.
fn power_norm_index<R: Real>(a: &CMatrix<R>, m_max: usize) -> Result<Option<usize>> {
    let equality_band = R::of(1e-10);
    let mut power = CMatrix::identity(a.nrows());
    for j in 1..=m_max + 1 {
        power = a * &power;
        let norm = crate::linalg::svd::spectral_norm(&power)?;
        if norm < R::one() - equality_band {
            return Ok(Some(j - 1));
        }
    }
    Ok(None)
}

/// Eigenvector of the unitary polar factor inside ker(I - Q); exists exactly
/// when a semi-contractive matrix has a unit-modulus eigenvalue.
fn unitary_eigvec_in_kernel<R: Real>(
    polar: &PolarFactors<R>,
    tol: &Tolerances<R>,
) -> Result<Option<Vec<Cx<R>>>> {
    let n = polar.u.nrows();
    let shrunk = (&CMatrix::identity(n) - &polar.q).symmetrize();
    let kernel = kernel_basis_floored(&shrunk, tol, R::one())?;
    if kernel.ncols() == 0 {
        return Ok(None);
    }
    // The unitary factor is normal: its Schur form is diagonal, so the Schur
    // basis columns are orthonormal eigenvectors.
    let dec = schur(&polar.u)?;
    let eigenvalues = dec.eigenvalues();
    let band = R::of(EIG_CLUSTER_TOL);
    for (_, members) in cluster_complex(&eigenvalues, band) {
        let eigenspace = select_columns(&dec.q, &members);
        let (overlap, witness) = max_overlap(&eigenspace, &kernel)?;
        if overlap >= R::one() - R::of(EIG_CLUSTER_TOL) {
            return Ok(witness);
        }
    }
    Ok(None)
}

/// Scaled hypocontractivity index: divide by the largest singular value,
/// then compute the plain index of the semi-contractive result.
pub fn scaled_dhc_index<R: Real>(
    a: &CMatrix<R>,
    tol: &Tolerances<R>,
) -> Result<DshcIndexResult<R>> {
    a.check_square_finite("scaled_dhc_index input")?;
    let sigma_max = crate::linalg::svd::spectral_norm(a)?;
    if sigma_max <= R::min_positive_value() {
        return Err(Error::Domain("scaled_dhc_index: zero matrix".into()));
    }
    let scaled = a.scale_real(R::one() / sigma_max);
    let index = dhc_index(&scaled, tol)?;

    // Independent existence criterion on the polar factors of A itself: the
    // scaled matrix stays non-hypocontractive exactly when some eigenvector
    // of Q at sigma_max is an eigenvector of U.
    let polar = polar_decompose(a, tol)?;
    let top_space = crate::matcore::hermitian_eigenspace(&polar.q, sigma_max)?;
    let blocked = unitary_eigvec_in_subspace(&polar.u, &top_space)?;
    if blocked == index.exists {
        return Err(Error::Internal(format!(
            "scaled_dhc_index: polar criterion (blocked = {blocked}) contradicts the index computation (exists = {})",
            index.exists
        )));
    }

    Ok(DshcIndexResult {
        sigma_max,
        exists: index.exists,
        m_dshc: index.m_dhc,
    })
}

fn unitary_eigvec_in_subspace<R: Real>(u: &CMatrix<R>, subspace: &CMatrix<R>) -> Result<bool> {
    if subspace.ncols() == 0 {
        return Ok(false);
    }
    let dec = schur(u)?;
    let eigenvalues = dec.eigenvalues();
    let band = R::of(EIG_CLUSTER_TOL);
    for (_, members) in cluster_complex(&eigenvalues, band) {
        let eigenspace = select_columns(&dec.q, &members);
        let (overlap, _) = max_overlap(&eigenspace, subspace)?;
        if overlap >= R::one() - R::of(EIG_CLUSTER_TOL) {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Exact spectral norms of the first `j_max` powers.
pub fn power_norm_profile<R: Real>(a: &CMatrix<R>, j_max: usize) -> Result<Vec<(usize, R)>> {
    a.check_square_finite("power_norm_profile input")?;
    if j_max == 0 {
        return Err(Error::InvalidInput("power_norm_profile: j_max >= 1".into()));
    }
    let mut out = Vec::with_capacity(j_max);
    let mut power = CMatrix::identity(a.nrows());
    for j in 1..=j_max {
        power = a * &power;
        out.push((j, crate::linalg::svd::spectral_norm(&power)?));
    }
    Ok(out)
}

/// Unit-modulus eigenvalue detection: the spectral test and two structural
/// eigenvector tests must agree.
pub fn unit_modulus_test<R: Real>(
    a: &CMatrix<R>,
    tol: &Tolerances<R>,
) -> Result<UnitModulusTest<R>> {
    a.check_square_finite("unit_modulus_test input")?;
    let sigma_max = crate::linalg::svd::spectral_norm(a)?;
    if sigma_max > R::one() + tol.tol_psd {
        return Err(Error::Precondition(
            "unit_modulus_test requires a semi-contractive matrix".into(),
        ));
    }
    let eigenvalues = crate::linalg::schur::eigenvalues(a)?;
    let band = modulus_band::<R>();
    let spectral_hit = eigenvalues
        .iter()
        .any(|l| (l.norm() - R::one()).abs() <= band);

    // Structural test via the polar factors.
    let polar = polar_decompose(a, tol)?;
    let witness = unitary_eigvec_in_kernel(&polar, tol)?;
    let polar_hit = witness.is_some();

    // Structural test on A directly: an eigenvector inside ker(I - A^H A).
    let defect = defect_matrix(a);
    let kernel = kernel_basis_floored(&defect, tol, R::one())?;
    let mut direct_hit = false;
    if kernel.ncols() > 0 {
        for (lambda, v) in crate::linalg::schur::eigen_pairs(a)? {
            if (lambda.norm() - R::one()).abs() > band {
                continue;
            }
            let dv = defect.matvec(&v);
            let res = dv.iter().fold(R::zero(), |acc, z| acc + z.norm_sqr()).sqrt();
            if res <= R::of(EIG_CLUSTER_TOL) * R::one().max(defect.max_abs()) {
                direct_hit = true;
                break;
            }
        }
    }

    if spectral_hit != polar_hit || spectral_hit != direct_hit {
        return Err(Error::Internal(format!(
            "unit_modulus_test: spectral ({spectral_hit}), polar ({polar_hit}) and direct ({direct_hit}) tests disagree"
        )));
    }
    Ok(UnitModulusTest {
        has_unit_modulus_eigenvalue: spectral_hit,
        witness,
    })
}

/// The summed Gram terms, for checking the telescoping identity against
/// I - (A^H)^{m+1} A^{m+1}.
pub fn telescoped_gram<R: Real>(a: &CMatrix<R>, m: usize) -> CMatrix<R> {
    let n = a.nrows();
    let mut sum = CMatrix::zeros(n, n);
    let defect = defect_matrix(a);
    let mut power = CMatrix::identity(n);
    for _ in 0..=m {
        sum = &sum + &(&(&power.adjoint() * &defect) * &power);
        power = a * &power;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;

    fn tol() -> Tolerances<f64> {
        Tolerances::default()
    }

    fn upper_shift(n: usize) -> CMatrix<f64> {
        CMatrix::from_fn(n, n, |i, j| {
            if j == i + 1 {
                cx(1.0, 0.0)
            } else {
                cx(0.0, 0.0)
            }
        })
    }

    fn chain_image() -> CMatrix<f64> {
        CMatrix::from_real_rows(&[
            &[0.2_f64, -0.8, 0.4, 0.0],
            &[0.8, -0.2, -0.4, 0.0],
            &[0.4, 0.4, -0.2, 0.0],
            &[0.0, 0.0, 0.0, 0.0],
        ])
    }

    #[test]
    fn classify_scaled_reflection() {
        // (1/2) [[1,-2],[0,-1]]: asymptotically stable, not semi-contractive.
        let a = CMatrix::from_real_rows(&[&[0.5_f64, -1.0], &[0.0, -0.5]]);
        let c = classify_discrete(&a, &tol()).unwrap();
        assert!(c.asymptotically_stable);
        assert!(c.hypocontractive);
        assert!(!c.semi_contractive);
        assert!((c.sigma_max - (1.0 + 2.0_f64.sqrt()) / 2.0).abs() < 1e-12);
        assert!((c.rho - 0.5).abs() < 1e-12);
    }

    #[test]
    fn classify_identity_and_zero() {
        let c = classify_discrete(&CMatrix::<f64>::identity(3), &tol()).unwrap();
        assert!(c.stable);
        assert!(c.semi_contractive);
        assert!(!c.contractive);
        assert!(!c.hypocontractive);
        assert_eq!(c.defect_index, 0);

        let c = classify_discrete(&CMatrix::<f64>::zeros(3, 3), &tol()).unwrap();
        assert!(c.contractive);
        assert!(c.hypocontractive);
        assert_eq!(c.defect_index, 3);
    }

    #[test]
    fn upper_shift_index_two_every_way() {
        let r = dhc_index(&upper_shift(3), &tol()).unwrap();
        assert_eq!(r.m_dhc, Some(2));
        for (name, v) in r.per_method.entries() {
            assert_eq!(v, Some(2), "method {name}");
        }
    }

    #[test]
    fn contractive_matrix_has_index_zero() {
        let half = CMatrix::<f64>::identity(3).scale_real(0.5);
        let r = dhc_index(&half, &tol()).unwrap();
        assert_eq!(r.m_dhc, Some(0));
        let c = classify_discrete(&half, &tol()).unwrap();
        assert!(c.contractive);
    }

    #[test]
    fn cayley_image_of_chain_has_index_two() {
        let a = chain_image();
        let r = dhc_index(&a, &tol()).unwrap();
        assert_eq!(r.m_dhc, Some(2));
        for (name, v) in r.per_method.entries() {
            assert_eq!(v, Some(2), "method {name}");
        }
        let c = classify_discrete(&a, &tol()).unwrap();
        assert!(c.semi_contractive);
        assert!(c.hypocontractive);
    }

    #[test]
    fn identity_has_no_index_and_a_witness() {
        let r = dhc_index(&CMatrix::<f64>::identity(2), &tol()).unwrap();
        assert!(!r.exists);
        let w = r.witness_vector.expect("witness");
        let norm: f64 = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        assert!((norm - 1.0).abs() < 1e-10);
    }

    #[test]
    fn expansive_matrix_rejected() {
        let a = upper_shift(3).scale_real(2.0);
        assert!(matches!(dhc_index(&a, &tol()), Err(Error::Precondition(_))));
    }

    #[test]
    fn scaled_index_of_doubled_shift() {
        let a = upper_shift(3).scale_real(2.0);
        let r = scaled_dhc_index(&a, &tol()).unwrap();
        assert!((r.sigma_max - 2.0).abs() < 1e-12);
        assert!(r.exists);
        assert_eq!(r.m_dshc, Some(2));
    }

    #[test]
    fn scaled_index_nonexistence_cases() {
        // Unitary input: scaling keeps it unitary.
        let rot = CMatrix::from_real_rows(&[&[0.0_f64, -1.0], &[1.0, 0.0]]);
        let r = scaled_dhc_index(&rot, &tol()).unwrap();
        assert!(!r.exists);

        // diag(2, 1): e1 is an eigenvector of both polar factors at the top
        // singular value.
        let a = CMatrix::from_real_rows(&[&[2.0_f64, 0.0], &[0.0, 1.0]]);
        let r = scaled_dhc_index(&a, &tol()).unwrap();
        assert!((r.sigma_max - 2.0).abs() < 1e-12);
        assert!(!r.exists);

        assert!(matches!(
            scaled_dhc_index(&CMatrix::<f64>::zeros(2, 2), &tol()),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn power_profile_of_shift_family() {
        let profile = power_norm_profile(&upper_shift(3), 3).unwrap();
        assert!((profile[0].1 - 1.0).abs() < 1e-12);
        assert!((profile[1].1 - 1.0).abs() < 1e-12);
        assert!(profile[2].1 < 1e-12);

        let profile = power_norm_profile(&CMatrix::<f64>::identity(2).scale_real(0.5), 3).unwrap();
        for (j, norm) in profile {
            assert!((norm - 0.5_f64.powi(j as i32)).abs() < 1e-12);
        }

        let profile = power_norm_profile(&upper_shift(3).scale_real(2.0), 3).unwrap();
        assert!((profile[0].1 - 2.0).abs() < 1e-12);
        assert!((profile[1].1 - 4.0).abs() < 1e-12);
        assert!(profile[2].1 < 1e-12);
    }

    #[test]
    fn telescoping_identity_holds() {
        let a = chain_image();
        for m in 0..=4 {
            let sum = telescoped_gram(&a, m);
            let mut power = CMatrix::identity(4);
            for _ in 0..=m {
                power = &a * &power;
            }
            let direct = &CMatrix::identity(4) - &(&power.adjoint() * &power);
            assert!((&sum - &direct).max_abs() < 1e-12, "m = {m}");
        }
    }

    #[test]
    fn unit_modulus_detection() {
        let out = unit_modulus_test(&CMatrix::<f64>::identity(2), &tol()).unwrap();
        assert!(out.has_unit_modulus_eigenvalue);
        assert!(out.witness.is_some());

        let out = unit_modulus_test(&CMatrix::<f64>::identity(2).scale_real(0.5), &tol()).unwrap();
        assert!(!out.has_unit_modulus_eigenvalue);

        let out = unit_modulus_test(&chain_image(), &tol()).unwrap();
        assert!(!out.has_unit_modulus_eigenvalue);
    }

    #[test]
    fn index_power_relation() {
        // With index k, the (k+1)-th power is contractive.
        let a = upper_shift(4);
        let r = dhc_index(&a, &tol()).unwrap();
        let k = r.m_dhc.unwrap();
        assert_eq!(k, 3);
        let power = a.pow(k + 1);
        let c = classify_discrete(&power, &tol()).unwrap();
        assert!(c.contractive);
    }

    #[test]
    fn defect_lower_bound() {
        // index >= (n - d) / d with d the defect index.
        for a in [upper_shift(3), upper_shift(5)] {
            let c = classify_discrete(&a, &tol()).unwrap();
            let r = dhc_index(&a, &tol()).unwrap();
            let d = c.defect_index;
            assert!(d > 0);
            let bound = (a.nrows() - d) as f64 / d as f64;
            assert!(r.m_dhc.unwrap() as f64 >= bound - 1e-12);
        }
    }
}
