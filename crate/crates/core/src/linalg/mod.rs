//! Dense complex linear-algebra kernels: LU, Hermitian Jacobi eigensolver,
//! one-sided Jacobi SVD, complex Schur via shifted QR, matrix exponential,
//! and subspace utilities.

pub mod expm;
pub mod hermitian;
pub mod lu;
pub mod schur;
pub mod subspace;
pub mod svd;
