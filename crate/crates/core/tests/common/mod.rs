//! Deterministic random matrix families shared by the integration suites.
#![allow(dead_code)]

use hypoindex_core::{C64, ComplexMatrix};
use rand::rngs::StdRng;
use rand::RngExt;

pub fn complex_entry(rng: &mut StdRng) -> C64 {
    C64::new(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0)
}

pub fn random_matrix(rng: &mut StdRng, n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |_, _| complex_entry(rng))
}

/// Haar-ish unitary via Gram-Schmidt with reorthogonalization.
pub fn random_unitary(rng: &mut StdRng, n: usize) -> ComplexMatrix {
    loop {
        let raw = random_matrix(rng, n);
        let mut cols: Vec<Vec<C64>> = (0..n).map(|j| raw.column(j)).collect();
        let mut ok = true;
        for j in 0..n {
            for _ in 0..2 {
                for k in 0..j {
                    let dot: C64 = (0..n).map(|i| cols[k][i].conj() * cols[j][i]).sum();
                    for i in 0..n {
                        let c = cols[k][i];
                        cols[j][i] -= dot * c;
                    }
                }
            }
            let norm: f64 = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-6 {
                ok = false;
                break;
            }
            for z in cols[j].iter_mut() {
                *z /= C64::new(norm, 0.0);
            }
        }
        if ok {
            return ComplexMatrix::from_fn(n, n, |i, j| cols[j][i]);
        }
    }
}

/// PSD Hermitian of exact rank `rank` built from random outer products.
pub fn random_psd(rng: &mut StdRng, n: usize, rank: usize) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(n, n);
    for _ in 0..rank {
        let g: Vec<C64> = (0..n).map(|_| complex_entry(rng)).collect();
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] += g[i] * g[j].conj();
            }
        }
    }
    out.symmetrize()
}

pub fn random_skew(rng: &mut StdRng, n: usize) -> ComplexMatrix {
    random_matrix(rng, n).skew_part()
}

/// Accretive matrix with a PSD Hermitian part of the requested rank.
pub fn random_accretive(rng: &mut StdRng, n: usize, rank: usize) -> ComplexMatrix {
    &random_psd(rng, n, rank) + &random_skew(rng, n)
}

/// Semi-contractive matrix U diag(q); `force_unit` pins one q at 1.
pub fn random_semicontractive(rng: &mut StdRng, n: usize, force_unit: bool) -> ComplexMatrix {
    let u = random_unitary(rng, n);
    let mut q: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    if force_unit {
        let slot = rng.random_range(0..n);
        q[slot] = 1.0;
    }
    let d = ComplexMatrix::from_fn(n, n, |i, j| {
        if i == j {
            C64::new(q[i], 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    &u * &d
}

/// Semi-dissipative generator -(R + J); hypocoercive for generic draws.
pub fn random_semidissipative(rng: &mut StdRng, n: usize, rank: usize) -> ComplexMatrix {
    -&random_accretive(rng, n, rank)
}

/// Asymptotically stable generator: coercive part plus a margin.
pub fn random_stable(rng: &mut StdRng, n: usize) -> ComplexMatrix {
    let mut a = random_semidissipative(rng, n, n);
    for i in 0..n {
        a[(i, i)] -= C64::new(0.3, 0.0);
    }
    a
}
