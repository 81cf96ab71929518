//! Stress tests for the dense kernels at the sizes and conditioning the
//! project targets: clustered and defective spectra for the Schur solver,
//! graded singular values for the SVD, and the matrix exponential against
//! an eigendecomposition oracle on normal matrices.

mod common;

use common::*;
use hypoindex_core::linalg::expm::expm;
use hypoindex_core::linalg::hermitian::hermitian_eigen;
use hypoindex_core::linalg::schur::{eigen_pairs, schur};
use hypoindex_core::linalg::svd::{singular_values, svd};
use hypoindex_core::{C64, ComplexMatrix};
use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};

fn unitary_similarity(rng: &mut StdRng, t: &ComplexMatrix) -> ComplexMatrix {
    let u = random_unitary(rng, t.nrows());
    &(&u * t) * &u.adjoint()
}

#[test]
fn schur_recovers_prescribed_spectra() {
    let mut rng = StdRng::seed_from_u64(0x7e57);
    for n in [6usize, 12, 24] {
        // Upper triangular with prescribed diagonal, hidden by a unitary.
        let mut target: Vec<C64> = (0..n)
            .map(|k| C64::new((k as f64) / n as f64 - 0.5, ((k * 7 % n) as f64) / n as f64))
            .collect();
        // Mild couplings keep the eigenvalue conditioning moderate; the
        // sensitivity of triangular spectra grows quickly with n otherwise.
        let mut t = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            t[(i, i)] = target[i];
            for j in i + 1..n {
                t[(i, j)] = complex_entry(&mut rng) * C64::new(0.3, 0.0);
            }
        }
        let a = unitary_similarity(&mut rng, &t);
        let s = schur(&a).unwrap();
        let mut got = s.eigenvalues();
        let key = |z: &C64| (z.re, z.im);
        got.sort_by(|x, y| key(x).partial_cmp(&key(y)).unwrap());
        target.sort_by(|x, y| key(x).partial_cmp(&key(y)).unwrap());
        for (g, e) in got.iter().zip(&target) {
            assert!((g - e).norm() < 1e-7, "n = {n}: {g} vs {e}");
        }
    }
}

#[test]
fn schur_handles_clustered_and_defective_spectra() {
    let mut rng = StdRng::seed_from_u64(0xc1c1);
    // All eigenvalues equal with nontrivial Jordan structure.
    let n = 8;
    let mut t = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        t[(i, i)] = C64::new(0.3, -0.7);
        if i + 1 < n && i % 2 == 0 {
            t[(i, i + 1)] = C64::new(1.0, 0.0);
        }
    }
    let a = unitary_similarity(&mut rng, &t);
    let s = schur(&a).unwrap();
    let recon = &(&s.q * &s.t) * &s.q.adjoint();
    assert!((&recon - &a).max_abs() < 1e-10);
    for lambda in s.eigenvalues() {
        assert!((lambda - C64::new(0.3, -0.7)).norm() < 1e-7);
    }

    // Unitary input: eigenvalues on the circle, orthonormal eigenvectors.
    let u = random_unitary(&mut rng, 10);
    for (lambda, v) in eigen_pairs(&u).unwrap() {
        assert!((lambda.norm() - 1.0).abs() < 1e-12);
        let uv = u.matvec(&v);
        let res: f64 = uv
            .iter()
            .zip(&v)
            .map(|(x, y)| (x - lambda * y).norm())
            .fold(0.0, f64::max);
        assert!(res < 1e-10);
    }
}

#[test]
fn svd_resolves_graded_singular_values() {
    let mut rng = StdRng::seed_from_u64(0x9ad3);
    let n = 6;
    let grades = [1.0, 1e-2, 1e-4, 1e-6, 1e-9, 1e-12];
    let u = random_unitary(&mut rng, n);
    let v = random_unitary(&mut rng, n);
    let mut sig = ComplexMatrix::zeros(n, n);
    for (i, &g) in grades.iter().enumerate() {
        sig[(i, i)] = C64::new(g, 0.0);
    }
    let a = &(&u * &sig) * &v.adjoint();
    let computed = singular_values(&a).unwrap();
    for (got, expect) in computed.iter().zip(&grades) {
        // Forming U Sigma V^H already perturbs tiny singular values by
        // eps * |A|; demand accuracy at that level, not beyond it.
        assert!(
            (got - expect).abs() <= 1e-6 * expect + 1e-14,
            "{got} vs {expect}"
        );
    }

    let f = svd(&a).unwrap();
    let mut rect = ComplexMatrix::zeros(n, n);
    for (k, &s) in f.sigma.iter().enumerate() {
        rect[(k, k)] = C64::new(s, 0.0);
    }
    let recon = &(&f.u * &rect) * &f.v.adjoint();
    assert!((&recon - &a).max_abs() < 1e-13);
}

#[test]
fn hermitian_eigen_matches_trace_and_residuals() {
    let mut rng = StdRng::seed_from_u64(0xeeee);
    for n in [5usize, 9, 17] {
        let h = (&random_matrix(&mut rng, n)).hermitian_part();
        let eig = hermitian_eigen(&h).unwrap();
        let trace: f64 = (0..n).map(|i| h[(i, i)].re).sum();
        let sum: f64 = eig.values.iter().sum();
        assert!((trace - sum).abs() < 1e-11 * trace.abs().max(1.0));
        for (k, &lambda) in eig.values.iter().enumerate() {
            let v = eig.vectors.column(k);
            let hv = h.matvec(&v);
            let res: f64 = hv
                .iter()
                .zip(&v)
                .map(|(x, y)| (x - C64::new(lambda, 0.0) * y).norm())
                .fold(0.0, f64::max);
            assert!(res < 1e-12 * h.max_abs().max(1.0));
        }
    }
}

#[test]
fn exponential_matches_eigendecomposition_on_normal_input() {
    let mut rng = StdRng::seed_from_u64(0xe1ee);
    for _ in 0..20 {
        let n = rng.random_range(2..=7);
        // Normal matrix: unitary-similar to a diagonal.
        let diag: Vec<C64> = (0..n)
            .map(|_| C64::new(rng.random::<f64>() * 4.0 - 2.0, rng.random::<f64>() * 4.0 - 2.0))
            .collect();
        let u = random_unitary(&mut rng, n);
        let a = &(&u * &ComplexMatrix::diagonal(&diag)) * &u.adjoint();
        for t in [0.1, 1.0, 2.5] {
            let direct = expm(&a.scale_real(t)).unwrap();
            let exp_diag: Vec<C64> = diag.iter().map(|l| (l * t).exp()).collect();
            let oracle = &(&u * &ComplexMatrix::diagonal(&exp_diag)) * &u.adjoint();
            let mu = diag.iter().map(|l| l.re).fold(f64::NEG_INFINITY, f64::max);
            let bound = 1e-12 * (mu * t).exp().max(1.0) * (n as f64);
            assert!(
                (&direct - &oracle).max_abs() <= bound,
                "gap {:e} vs bound {bound:e}",
                (&direct - &oracle).max_abs()
            );
        }
    }
}

#[test]
fn defective_boundary_spectra_never_classify_stable() {
    // A nilpotent block has every eigenvalue on the boundary and defective.
    // Computed spectra spread by roughly eps^(1/k): narrow spreads stay in
    // one cluster and fail the geometric-multiplicity test, wide spreads
    // push some eigenvalue across the half-plane band. Either way the
    // classification must reject stability.
    use hypoindex_core::coercivity::classify_continuous;
    use hypoindex_core::contractivity::classify_discrete;
    use hypoindex_core::matcore::Tolerances;

    let tol = Tolerances::default();
    let mut rng = StdRng::seed_from_u64(0x70ad);
    for n in [2usize, 3, 4, 5] {
        let block = ComplexMatrix::from_fn(n, n, |i, j| {
            if j == i + 1 {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let u = random_unitary(&mut rng, n);
        let hidden = &(&u * &block) * &u.adjoint();
        let c = classify_continuous(&hidden, &tol).unwrap();
        assert!(!c.stable, "hidden nilpotent block n={n} classified stable");

        // Discrete variant: shift the block onto the unit circle.
        let mut on_circle = hidden.clone();
        for i in 0..n {
            on_circle[(i, i)] += C64::new(1.0, 0.0);
        }
        let d = classify_discrete(&on_circle, &tol).unwrap();
        assert!(!d.stable, "unit-circle defective block n={n} classified stable");
    }
}

#[test]
fn exponential_overflow_is_an_error() {
    use hypoindex_core::matcore::matrix_exponential;
    let a = ComplexMatrix::from_real_rows(&[&[800.0, 0.0], &[0.0, 1.0]]);
    assert!(matrix_exponential(&a, 1.0).is_err());
    // Large but representable arguments still work.
    let a = ComplexMatrix::from_real_rows(&[&[500.0, 0.0], &[0.0, 1.0]]);
    let e = matrix_exponential(&a, 1.0).unwrap();
    assert!((e[(0, 0)].re.ln() - 500.0).abs() < 1e-9);
}

#[test]
fn staircase_handles_indefinite_hermitian_matrices() {
    use hypoindex_core::matcore::Tolerances;
    use hypoindex_core::staircase::staircase_jr;
    let tol = Tolerances::default();
    let mut rng = StdRng::seed_from_u64(0x1d3f);
    for _ in 0..40 {
        let n = rng.random_range(2..=6);
        // Indefinite Hermitian with a kernel: difference of two PSD parts.
        let rank = rng.random_range(1..=n);
        let plus = random_psd(&mut rng, n, rank);
        let minus = random_psd(&mut rng, n, 1);
        let r = (&plus - &minus).symmetrize();
        let j = random_skew(&mut rng, n);
        let form = staircase_jr(&j, &r, &tol).unwrap();
        let v = &form.validity;
        assert!(v.unitarity_defect <= 1e-12);
        assert!(v.reconstruction_error_first <= 1e-10);
        assert!(v.reconstruction_error_second <= 1e-10);
        assert!(v.max_offpattern_first <= 1e-10);
        assert!(v.max_offpattern_second <= 1e-10);
        assert!(v.monotone_blocks);
        assert!(v.subdiagonals_full_rank);
    }
}
