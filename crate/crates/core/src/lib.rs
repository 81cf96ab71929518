//! Classification of complex square matrices for continuous- and
//! discrete-time linear dynamics: stability, semi-dissipativity and
//! semi-contractivity, hypocoercivity and hypocontractivity indices (plain,
//! shifted, and scaled variants), staircase reductions, Cayley transforms
//! with Lyapunov/Stein solvers, and empirical short-time decay diagnostics.
//!
//! All numerics are generic over the base real scalar (`f32`/`f64`) through
//! the [`scalar::Real`] trait; the aliases below pin the default `f64`
//! instantiation used by the CLI and tests.

pub mod analysis;
pub mod coercivity;
pub mod contractivity;
pub mod error;
pub mod linalg;
pub mod matcore;
pub mod matrix;
pub mod scalar;
pub mod staircase;
pub mod transforms;

pub use error::{Error, Result};
pub use matrix::CMatrix;
pub use scalar::{Cx, Real};

/// Default dense complex matrix (double precision).
pub type ComplexMatrix = CMatrix<f64>;
/// Default complex scalar.
pub type C64 = num_complex::Complex<f64>;
/// Default tolerance bundle.
pub type Tolerances = matcore::Tolerances<f64>;
