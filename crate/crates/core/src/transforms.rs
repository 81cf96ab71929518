//! Cayley maps between continuous- and discrete-time systems, plus dense
//! Lyapunov/Stein solvers and the correspondence between their solutions.

use crate::coercivity::classify_continuous;
use crate::contractivity::{classify_discrete, defect_matrix};
use crate::error::{Error, Result};
use crate::linalg::hermitian::hermitian_eigen;
use crate::linalg::lu::{self, kronecker, unvec_columns, vec_columns};
use crate::linalg::schur;
use crate::matcore::{is_psd, numerical_rank_floored, Tolerances};
use crate::matrix::{shift_identity, CMatrix};
use crate::scalar::{c_one, c_real, Cx, Real};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CayleyDirection {
    #[serde(rename = "c_to_d")]
    ContinuousToDiscrete,
    #[serde(rename = "d_to_c")]
    DiscreteToContinuous,
}

#[derive(Debug, Clone, Serialize)]
pub struct CayleyResult<R: Real> {
    pub image: CMatrix<R>,
    pub direction: CayleyDirection,
    /// Unit-modulus shift of the discrete-to-continuous map (1 by default).
    pub shift_alpha: Cx<R>,
    pub well_defined: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EquationKind {
    Continuous,
    Discrete,
}

#[derive(Debug, Clone, Serialize)]
pub struct LyapunovSolution<R: Real> {
    pub p: CMatrix<R>,
    pub residual: R,
    pub equation_kind: EquationKind,
    /// Smallest eigenvalue of the Hermitian-symmetrized solution; positive
    /// definiteness is reported rather than required for PSD right-hand sides.
    pub min_eigenvalue: R,
}

#[derive(Debug, Clone, Serialize)]
pub struct IndexPreservation {
    pub m_hc: usize,
    pub m_dhc: usize,
    pub equal: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct LyapunovCayleyMap<R: Real> {
    pub p: CMatrix<R>,
    pub q_discrete: CMatrix<R>,
    pub residual_continuous: R,
    pub residual_discrete: R,
}

/// Distance from the spectrum to the singular point of a resolvent-style map.
fn guard_resolvent<R: Real>(
    a: &CMatrix<R>,
    point: Cx<R>,
    what: &str,
) -> Result<()> {
    let eigenvalues = schur::eigenvalues(a)?;
    let (dist, nearest) = eigenvalues
        .iter()
        .map(|&l| ((l - point).norm(), l))
        .fold((R::infinity(), point), |acc, x| if x.0 < acc.0 { x } else { acc });
    if dist <= R::of(1e-10) * R::one().max(a.max_abs()) {
        return Err(Error::Singular {
            reason: format!("{what}: eigenvalue at distance {dist:e} from the singular point"),
            eigenvalue_re: nearest.re.to_f64().unwrap_or(f64::NAN),
            eigenvalue_im: nearest.im.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(())
}

/// (I + A)(I - A)^{-1}, with stability/contractivity posts verified.
pub fn cayley<R: Real>(a_c: &CMatrix<R>, tol: &Tolerances<R>) -> Result<CayleyResult<R>> {
    a_c.check_square_finite("cayley input")?;
    let n = a_c.nrows();
    guard_resolvent(a_c, c_one(), "cayley")?;
    let eye = CMatrix::identity(n);
    let plus = &eye + a_c;
    let minus = &eye - a_c;
    let image = lu::solve(&minus, &plus)
        .map_err(|e| Error::Numerical(format!("cayley resolvent solve failed: {e}")))?;

    verify_cayley_posts(a_c, &image, tol)?;
    Ok(CayleyResult {
        image,
        direction: CayleyDirection::ContinuousToDiscrete,
        shift_alpha: c_one(),
        well_defined: true,
    })
}

fn verify_cayley_posts<R: Real>(
    a_c: &CMatrix<R>,
    a_d: &CMatrix<R>,
    tol: &Tolerances<R>,
) -> Result<()> {
    let cont = classify_continuous(a_c, tol)?;
    let disc = classify_discrete(a_d, tol)?;
    if cont.negative_hypocoercive && !disc.hypocontractive {
        return Err(Error::Internal(
            "cayley: negative hypocoercive input mapped to a non-hypocontractive image".into(),
        ));
    }
    if cont.semi_dissipative {
        if !disc.semi_contractive {
            return Err(Error::Internal(
                "cayley: semi-dissipative input mapped to a non-semi-contractive image".into(),
            ));
        }
        let dim_h =
            a_c.nrows() - numerical_rank_floored(&a_c.hermitian_part(), tol, a_c.max_abs())?;
        let dim_d = a_d.nrows() - numerical_rank_floored(&defect_matrix(a_d), tol, R::one())?;
        if dim_h != dim_d {
            return Err(Error::Internal(format!(
                "cayley: kernel dimensions not preserved ({dim_h} vs {dim_d})"
            )));
        }
    }
    Ok(())
}

/// (A - alpha I)(A + alpha I)^{-1} for a unit-modulus alpha (1 by default).
pub fn inverse_cayley<R: Real>(
    a_d: &CMatrix<R>,
    alpha: Cx<R>,
    tol: &Tolerances<R>,
) -> Result<CayleyResult<R>> {
    a_d.check_square_finite("inverse_cayley input")?;
    if (alpha.norm() - R::one()).abs() > R::of(1e-12) {
        return Err(Error::InvalidInput(
            "inverse_cayley: alpha must have unit modulus".into(),
        ));
    }
    let n = a_d.nrows();
    guard_resolvent(a_d, -alpha, "inverse_cayley (try a different alpha)")?;
    let shifted_minus = shift_identity(a_d, -alpha);
    let shifted_plus = shift_identity(a_d, alpha);
    // A_c = (A - aI)(A + aI)^{-1}; both factors commute, solve from the right.
    let image_t = lu::solve(&shifted_plus.transpose(), &shifted_minus.transpose())
        .map_err(|e| Error::Numerical(format!("inverse_cayley solve failed: {e}")))?;
    let image = image_t.transpose();

    let disc = classify_discrete(a_d, tol)?;
    let cont = classify_continuous(&image, tol)?;
    if disc.hypocontractive && !cont.negative_hypocoercive {
        return Err(Error::Internal(
            "inverse_cayley: hypocontractive input mapped to a non-negative-hypocoercive image"
                .into(),
        ));
    }
    if disc.semi_contractive {
        if !cont.semi_dissipative {
            return Err(Error::Internal(
                "inverse_cayley: semi-contractive input mapped to a non-semi-dissipative image"
                    .into(),
            ));
        }
        let dim_d = n - numerical_rank_floored(&defect_matrix(a_d), tol, R::one())?;
        let dim_h =
            n - numerical_rank_floored(&image.hermitian_part(), tol, image.max_abs())?;
        if dim_h != dim_d {
            return Err(Error::Internal(format!(
                "inverse_cayley: kernel dimensions not preserved ({dim_d} vs {dim_h})"
            )));
        }
    }
    Ok(CayleyResult {
        image,
        direction: CayleyDirection::DiscreteToContinuous,
        shift_alpha: alpha,
        well_defined: true,
    })
}

/// (I + (t/2) A)(I - (t/2) A)^{-1}: one-step rational time discretization.
pub fn scaled_cayley<R: Real>(
    a_c: &CMatrix<R>,
    t: R,
    tol: &Tolerances<R>,
) -> Result<CayleyResult<R>> {
    if !(t > R::zero()) || !t.is_finite() {
        return Err(Error::InvalidInput("scaled_cayley: t must be positive".into()));
    }
    let half_step = a_c.scale_real(t * R::of(0.5));
    cayley(&half_step, tol)
}

/// The index survives the transform in both directions; checked by direct
/// computation on each side.
pub fn index_preservation_check<R: Real>(
    a_c: &CMatrix<R>,
    tol: &Tolerances<R>,
) -> Result<IndexPreservation> {
    let cont = classify_continuous(a_c, tol)?;
    if !cont.semi_dissipative || !cont.negative_hypocoercive {
        return Err(Error::Precondition(
            "index_preservation_check requires a semi-dissipative, negative hypocoercive matrix"
                .into(),
        ));
    }
    let m_hc = crate::coercivity::hc_index(&(-a_c), tol)?
        .m_hc
        .ok_or_else(|| Error::Internal("negative hypocoercive matrix lost its index".into()))?;
    let image = cayley(a_c, tol)?.image;
    let m_dhc = crate::contractivity::dhc_index(&image, tol)?
        .m_dhc
        .ok_or_else(|| Error::Internal("hypocontractive image lost its index".into()))?;
    Ok(IndexPreservation {
        m_hc,
        m_dhc,
        equal: m_hc == m_dhc,
    })
}

/// Solve A^H P + P A = -Q by dense Kronecker vectorization.
pub fn solve_lyapunov_continuous<R: Real>(
    a: &CMatrix<R>,
    q: &CMatrix<R>,
    tol: &Tolerances<R>,
) -> Result<LyapunovSolution<R>> {
    a.check_square_finite("lyapunov A")?;
    q.check_square_finite("lyapunov Q")?;
    let n = a.nrows();
    if q.nrows() != n {
        return Err(Error::InvalidInput("lyapunov: dimension mismatch".into()));
    }
    let cont = classify_continuous(a, tol)?;
    if !cont.asymptotically_stable {
        return Err(Error::Precondition(format!(
            "continuous Lyapunov solve requires an asymptotically stable matrix (alpha = {:e})",
            cont.alpha
        )));
    }
    check_psd_rhs(q, tol)?;

    let eye = CMatrix::identity(n);
    let system = &kronecker(&eye, &a.adjoint()) + &kronecker(&a.transpose(), &eye);
    let rhs: Vec<Cx<R>> = vec_columns(&(-q));
    let solution = lu::lu(&system)
        .map_err(|e| Error::Numerical(format!("Kronecker system factorization failed: {e}")))?
        .solve_vec(&rhs);
    let p = unvec_columns(&solution, n, n).symmetrize();

    let residual_mat = &(&(&a.adjoint() * &p) + &(&p * a)) + q;
    let residual = residual_mat.frobenius_norm();
    let min_eigenvalue = hermitian_eigen(&p)?.values[0];
    Ok(LyapunovSolution {
        p,
        residual,
        equation_kind: EquationKind::Continuous,
        min_eigenvalue,
    })
}

/// Solve A^H P A - P = -Q by dense Kronecker vectorization, cross-checked
/// against the truncated series sum_j (A^H)^j Q A^j.
pub fn solve_lyapunov_discrete<R: Real>(
    a: &CMatrix<R>,
    q: &CMatrix<R>,
    tol: &Tolerances<R>,
) -> Result<LyapunovSolution<R>> {
    a.check_square_finite("stein A")?;
    q.check_square_finite("stein Q")?;
    let n = a.nrows();
    if q.nrows() != n {
        return Err(Error::InvalidInput("stein: dimension mismatch".into()));
    }
    let disc = classify_discrete(a, tol)?;
    if !disc.asymptotically_stable {
        return Err(Error::Precondition(format!(
            "discrete Lyapunov solve requires spectral radius below one (rho = {:e})",
            disc.rho
        )));
    }
    check_psd_rhs(q, tol)?;

    let eye = CMatrix::identity(n);
    let system = &kronecker(&a.transpose(), &a.adjoint()) - &kronecker(&eye, &eye);
    let rhs: Vec<Cx<R>> = vec_columns(&(-q));
    let solution = lu::lu(&system)
        .map_err(|e| Error::Numerical(format!("Kronecker system factorization failed: {e}")))?
        .solve_vec(&rhs);
    let p = unvec_columns(&solution, n, n).symmetrize();

    // Independent oracle: truncate the series once terms fall below 1e-14.
    let series = stein_series(a, q, R::of(1e-14))?;
    let series_gap = (&p - &series).max_abs();
    let scale = p.max_abs().max(R::one());
    if series_gap > R::of(1e-9) * scale {
        return Err(Error::Internal(format!(
            "Stein solve disagrees with the series oracle by {series_gap:e}"
        )));
    }

    let residual_mat = &(&(&(&a.adjoint() * &p) * a) - &p) + q;
    let residual = residual_mat.frobenius_norm();
    let min_eigenvalue = hermitian_eigen(&p)?.values[0];
    Ok(LyapunovSolution {
        p,
        residual,
        equation_kind: EquationKind::Discrete,
        min_eigenvalue,
    })
}

/// Truncated series solution of the discrete equation.
pub fn stein_series<R: Real>(a: &CMatrix<R>, q: &CMatrix<R>, term_tol: R) -> Result<CMatrix<R>> {
    let mut total = q.clone();
    let mut power = a.clone();
    let max_terms = 100_000usize;
    for _ in 0..max_terms {
        let term = &(&power.adjoint() * q) * &power;
        total = &total + &term;
        if term.max_abs() <= term_tol * q.max_abs().max(R::min_positive_value()) {
            return Ok(total.symmetrize());
        }
        power = a * &power;
    }
    Err(Error::Numerical(
        "Stein series did not reach the truncation tolerance".into(),
    ))
}

fn check_psd_rhs<R: Real>(q: &CMatrix<R>, tol: &Tolerances<R>) -> Result<()> {
    let scale = q.max_abs().max(R::min_positive_value());
    if q.hermitian_defect() > tol.tol_sym * scale {
        return Err(Error::Domain("right-hand side must be Hermitian".into()));
    }
    if !is_psd(q, tol)? {
        return Err(Error::Domain(
            "right-hand side must be positive semi-definite".into(),
        ));
    }
    Ok(())
}

/// One positive definite P solves both equations: the continuous one with
/// Q_c and the discrete one (for the transformed matrix) with
/// Q_d = 2 (I - A^H)^{-1} Q_c (I - A)^{-1}.
pub fn lyapunov_cayley_map<R: Real>(
    a_c: &CMatrix<R>,
    q_c: &CMatrix<R>,
    tol: &Tolerances<R>,
) -> Result<LyapunovCayleyMap<R>> {
    let continuous = solve_lyapunov_continuous(a_c, q_c, tol)?;
    let a_d = cayley(a_c, tol)?.image;

    let n = a_c.nrows();
    let eye = CMatrix::identity(n);
    let minus = &eye - a_c;
    let inv_minus = lu::inverse(&minus)
        .map_err(|e| Error::Numerical(format!("resolvent inversion failed: {e}")))?;
    let q_d = (&(&inv_minus.adjoint() * q_c) * &inv_minus)
        .scale(c_real(R::of(2.0)))
        .symmetrize();

    let p = &continuous.p;
    let residual_discrete = (&(&(&(&a_d.adjoint() * p) * &a_d) - p) + &q_d).frobenius_norm();
    Ok(LyapunovCayleyMap {
        p: continuous.p.clone(),
        q_discrete: q_d,
        residual_continuous: continuous.residual,
        residual_discrete,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;

    fn tol() -> Tolerances<f64> {
        Tolerances::default()
    }

    fn chain_4x4() -> CMatrix<f64> {
        CMatrix::from_real_rows(&[
            &[0.0_f64, -1.0, 0.0, 0.0],
            &[1.0, 0.0, -1.0, 0.0],
            &[0.0, 1.0, -1.0, 0.0],
            &[0.0, 0.0, 0.0, -1.0],
        ])
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
    fn chain_maps_to_known_image() {
        let out = cayley(&chain_4x4(), &tol()).unwrap();
        assert!((&out.image - &chain_image()).max_abs() < 1e-12);
    }

    #[test]
    fn zero_and_negative_identity() {
        let out = cayley(&CMatrix::<f64>::zeros(3, 3), &tol()).unwrap();
        assert!((&out.image - &CMatrix::identity(3)).max_abs() < 1e-14);

        let out = cayley(&(-&CMatrix::<f64>::identity(3)), &tol()).unwrap();
        assert!(out.image.max_abs() < 1e-14);
    }

    #[test]
    fn singular_point_is_detected() {
        let a = CMatrix::from_real_rows(&[&[1.0_f64, 0.0], &[0.0, -1.0]]);
        assert!(matches!(cayley(&a, &tol()), Err(Error::Singular { .. })));
    }

    #[test]
    fn inverse_cayley_known_images() {
        // Twice the upper shift maps back to the displayed upper triangular matrix.
        let shift2 = CMatrix::from_real_rows(&[
            &[0.0_f64, 2.0, 0.0],
            &[0.0, 0.0, 2.0],
            &[0.0, 0.0, 0.0],
        ]);
        let out = inverse_cayley(&shift2, c_one(), &tol()).unwrap();
        let expect = CMatrix::from_real_rows(&[
            &[-1.0_f64, 4.0, -8.0],
            &[0.0, -1.0, 4.0],
            &[0.0, 0.0, -1.0],
        ]);
        assert!((&out.image - &expect).max_abs() < 1e-12);

        let out = inverse_cayley(&CMatrix::<f64>::zeros(2, 2), c_one(), &tol()).unwrap();
        assert!((&out.image + &CMatrix::identity(2)).max_abs() < 1e-14);

        let out = inverse_cayley(&chain_image(), c_one(), &tol()).unwrap();
        assert!((&out.image - &chain_4x4()).max_abs() < 1e-12);
    }

    #[test]
    fn round_trip_restores_input() {
        let a = chain_4x4();
        let there = cayley(&a, &tol()).unwrap();
        let back = inverse_cayley(&there.image, c_one(), &tol()).unwrap();
        assert!((&back.image - &a).max_abs() < 1e-11);
    }

    #[test]
    fn alpha_shift_dodges_spectrum() {
        // -1 is an eigenvalue: the default map is singular, a rotated shift works.
        let a = CMatrix::from_real_rows(&[&[-1.0_f64, 0.0], &[0.0, 0.5]]);
        assert!(matches!(
            inverse_cayley(&a, c_one(), &tol()),
            Err(Error::Singular { .. })
        ));
        let alpha = cx(0.0, 1.0);
        let out = inverse_cayley(&a, alpha, &tol()).unwrap();
        assert!(out.well_defined);
    }

    #[test]
    fn scaled_cayley_matches_plain_at_t_two()  {
        let a = chain_4x4();
        let plain = cayley(&a, &tol()).unwrap();
        let scaled = scaled_cayley(&a, 2.0, &tol()).unwrap();
        assert!((&plain.image - &scaled.image).max_abs() < 1e-14);
    }

    #[test]
    fn scaled_cayley_keeps_the_index() {
        let a = chain_4x4();
        let out = scaled_cayley(&a, 1.0, &tol()).unwrap();
        let idx = crate::contractivity::dhc_index(&out.image, &tol()).unwrap();
        assert_eq!(idx.m_dhc, Some(2));
    }

    #[test]
    fn preservation_check_on_chain() {
        let out = index_preservation_check(&chain_4x4(), &tol()).unwrap();
        assert_eq!(out.m_hc, 2);
        assert_eq!(out.m_dhc, 2);
        assert!(out.equal);

        let out = index_preservation_check(&(-&CMatrix::<f64>::identity(3)), &tol()).unwrap();
        assert_eq!(out.m_hc, 0);
        assert_eq!(out.m_dhc, 0);
    }

    #[test]
    fn continuous_lyapunov_examples() {
        // A = -B with the shear B; P = [[2,-1],[-1,2]] satisfies B^H P + P B = P.
        let b = CMatrix::from_real_rows(&[&[1.0_f64, -1.0], &[1.0, 0.0]]);
        let a = -&b;
        let p_expect = CMatrix::from_real_rows(&[&[2.0_f64, -1.0], &[-1.0, 2.0]]);
        let lhs = &(&b.adjoint() * &p_expect) + &(&p_expect * &b);
        assert!((&lhs - &p_expect).max_abs() < 1e-13);
        // Against q = P: A^H P + P A = -(B^H P + P B) = -P.
        let out = solve_lyapunov_continuous(&a, &p_expect, &tol()).unwrap();
        assert!((&out.p - &p_expect).max_abs() < 1e-10);
        assert!(out.residual < 1e-10);
        assert!(out.min_eigenvalue > 0.0);

        let out = solve_lyapunov_continuous(
            &(-&CMatrix::<f64>::identity(2)),
            &CMatrix::identity(2).scale_real(2.0),
            &tol(),
        )
        .unwrap();
        assert!((&out.p - &CMatrix::identity(2)).max_abs() < 1e-12);
    }

    #[test]
    fn lyapunov_rejects_unstable() {
        let a = CMatrix::from_real_rows(&[&[1.0_f64, 0.0], &[0.0, -1.0]]);
        assert!(matches!(
            solve_lyapunov_continuous(&a, &CMatrix::identity(2), &tol()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn discrete_lyapunov_examples() {
        let out =
            solve_lyapunov_discrete(&CMatrix::<f64>::zeros(2, 2), &CMatrix::identity(2), &tol())
                .unwrap();
        assert!((&out.p - &CMatrix::identity(2)).max_abs() < 1e-13);

        // A = I/2, Q = I: geometric series gives P = (4/3) I.
        let out = solve_lyapunov_discrete(
            &CMatrix::<f64>::identity(2).scale_real(0.5),
            &CMatrix::identity(2),
            &tol(),
        )
        .unwrap();
        let expect = CMatrix::<f64>::identity(2).scale_real(4.0 / 3.0);
        assert!((&out.p - &expect).max_abs() < 1e-12);

        let out = solve_lyapunov_discrete(&chain_image(), &CMatrix::identity(4), &tol()).unwrap();
        assert!(out.residual < 1e-10);
    }

    #[test]
    fn lyapunov_map_closed_form() {
        // A_c = -I, Q_c = 2I: P = I, image is 0, Q_d = I.
        let out = lyapunov_cayley_map(
            &(-&CMatrix::<f64>::identity(2)),
            &CMatrix::identity(2).scale_real(2.0),
            &tol(),
        )
        .unwrap();
        assert!((&out.p - &CMatrix::identity(2)).max_abs() < 1e-12);
        assert!((&out.q_discrete - &CMatrix::identity(2)).max_abs() < 1e-12);
        assert!(out.residual_continuous < 1e-12);
        assert!(out.residual_discrete < 1e-12);
    }

    #[test]
    fn lyapunov_map_shear_example() {
        let b = CMatrix::from_real_rows(&[&[1.0_f64, -1.0], &[1.0, 0.0]]);
        let a_c = -&b;
        let q_c = CMatrix::from_real_rows(&[&[2.0_f64, -1.0], &[-1.0, 2.0]]);
        let out = lyapunov_cayley_map(&a_c, &q_c, &tol()).unwrap();
        // The same weight solves the continuous equation, so P = Q_c here.
        assert!((&out.p - &q_c).max_abs() < 1e-10);
        assert!(out.residual_continuous < 1e-10);
        assert!(out.residual_discrete < 1e-9);
    }

    #[test]
    fn congruence_identities() {
        let a_c = chain_4x4();
        let a_d = cayley(&a_c, &tol()).unwrap().image;
        let n = 4;
        let eye = CMatrix::identity(n);
        // I - A_d^H A_d = -4 (I - A_c)^{-H} A_H (I - A_c)^{-1}
        let defect = &eye - &(&a_d.adjoint() * &a_d);
        let inv_minus = lu::inverse(&(&eye - &a_c)).unwrap();
        let rhs = (&(&inv_minus.adjoint() * &a_c.hermitian_part()) * &inv_minus).scale_real(-4.0);
        assert!((&defect - &rhs).max_abs() < 1e-10);
        // A_H = -(A_d + I)^{-H} (I - A_d^H A_d)(A_d + I)^{-1}
        let inv_plus = lu::inverse(&(&a_d + &eye)).unwrap();
        let rhs2 = (&(&inv_plus.adjoint() * &defect) * &inv_plus).scale_real(-1.0);
        assert!((&a_c.hermitian_part() - &rhs2).max_abs() < 1e-10);
    }
}
