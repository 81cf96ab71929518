//! Real scalar abstraction: all numerics are generic over `f32`/`f64`.

use num_complex::Complex;
use num_traits::{Float, FromPrimitive, NumAssign};
use std::fmt::{Debug, Display};

/// Floating-point base scalar. Matrices store `Complex<R>` entries; every
/// algorithm in this crate is written against this trait so the whole stack
/// instantiates for both `f32` and `f64`.
pub trait Real:
    Float
    + FromPrimitive
    + NumAssign
    + Debug
    + Display
    + std::fmt::LowerExp
    + Send
    + Sync
    + serde::Serialize
    + 'static
{
    /// Lossless conversion from `f64` literals (rounds for `f32`).
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 converts to any Real")
    }

    fn of_usize(x: usize) -> Self {
        Self::from_usize(x).expect("usize converts to any Real")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex scalar over the generic real base.
pub type Cx<R> = Complex<R>;

pub fn cx<R: Real>(re: R, im: R) -> Cx<R> {
    Complex::new(re, im)
}

pub fn c_zero<R: Real>() -> Cx<R> {
    Complex::new(R::zero(), R::zero())
}

pub fn c_one<R: Real>() -> Cx<R> {
    Complex::new(R::one(), R::zero())
}

pub fn c_real<R: Real>(re: R) -> Cx<R> {
    Complex::new(re, R::zero())
}
