//! Timing probe at the upper end of the intended size range.

use hypoindex_core::coercivity::hc_index;
use hypoindex_core::matcore::{spectral_quantities, Tolerances};
use hypoindex_core::{C64, ComplexMatrix};
use std::time::Instant;

fn main() {
    let tol = Tolerances::default();
    let n = 100;
    let mut state = 0x12345678u64;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    let raw = ComplexMatrix::from_fn(n, n, |_, _| C64::new(next(), next()));
    let herm = raw.hermitian_part();
    let gram = &herm * &herm.adjoint();
    let skew = ComplexMatrix::from_fn(n, n, |_, _| C64::new(next(), next())).skew_part();
    let b = &gram + &skew;

    let t0 = Instant::now();
    let (_, summary) = spectral_quantities(&b, &tol).unwrap();
    println!(
        "spectral_quantities at n={n}: {:?} (alpha {:.3}, sigma {:.3})",
        t0.elapsed(),
        summary.alpha,
        summary.sigma_max
    );

    let t0 = Instant::now();
    let idx = hc_index(&b, &tol).unwrap();
    println!("hc_index at n={n}: {:?} (m = {:?})", t0.elapsed(), idx.m_hc);
}
