//! Matrix exponential by scaling-and-squaring with a degree-13 Pade
//! approximant (Higham's method).

use crate::error::{Error, Result};
use crate::linalg::lu;
use crate::matrix::CMatrix;
use crate::scalar::{c_real, Real};

const PADE13_THETA: f64 = 5.371920351148152;

const PADE13_B: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

pub fn expm<R: Real>(a: &CMatrix<R>) -> Result<CMatrix<R>> {
    let n = a.nrows();
    debug_assert!(a.is_square());
    if n == 0 {
        return Ok(CMatrix::identity(0));
    }
    if !a.is_finite() {
        return Err(Error::InvalidInput("matrix exponential of non-finite input".into()));
    }

    let norm = a.one_norm();
    let theta = R::of(PADE13_THETA);
    let mut squarings = 0u32;
    let mut scaled = a.clone();
    if norm > theta {
        let ratio = (norm / theta).log2().ceil();
        squarings = ratio
            .to_f64()
            .map(|r| r.max(0.0) as u32)
            .unwrap_or(0)
            .min(64);
        let factor = R::of(0.5).powi(squarings as i32);
        scaled = scaled.scale_real(factor);
    }

    let b: Vec<_> = PADE13_B.iter().map(|&c| c_real(R::of(c))).collect();
    let eye = CMatrix::identity(n);
    let a2 = &scaled * &scaled;
    let a4 = &a2 * &a2;
    let a6 = &a2 * &a4;

    // U = A [A6 (b13 A6 + b11 A4 + b9 A2) + b7 A6 + b5 A4 + b3 A2 + b1 I]
    let u_inner = &(&a6.scale(b[13]) + &a4.scale(b[11])) + &a2.scale(b[9]);
    let u_poly = &(&(&(&a6 * &u_inner) + &a6.scale(b[7])) + &a4.scale(b[5]))
        + &(&a2.scale(b[3]) + &eye.scale(b[1]));
    let u = &scaled * &u_poly;
    // V = A6 (b12 A6 + b10 A4 + b8 A2) + b6 A6 + b4 A4 + b2 A2 + b0 I
    let v_inner = &(&a6.scale(b[12]) + &a4.scale(b[10])) + &a2.scale(b[8]);
    let v = &(&(&(&a6 * &v_inner) + &a6.scale(b[6])) + &a4.scale(b[4]))
        + &(&a2.scale(b[2]) + &eye.scale(b[0]));

    // exp(A) ~ (V - U)^{-1} (V + U)
    let denom = &v - &u;
    let numer = &v + &u;
    let mut result = lu::solve(&denom, &numer)
        .map_err(|e| Error::Numerical(format!("Pade denominator solve failed: {e}")))?;

    for _ in 0..squarings {
        result = &result * &result;
    }
    if !result.is_finite() {
        return Err(Error::Numerical(
            "matrix exponential overflowed the floating-point range".into(),
        ));
    }
    Ok(result)
}
