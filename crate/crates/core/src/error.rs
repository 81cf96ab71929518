//! Error taxonomy shared by the whole crate.
//!
//! The variants mirror the failure classes surfaced by the CLI exit codes:
//! input problems, violated mathematical preconditions, tolerance-ambiguous
//! (indeterminate) discrete decisions, and internal consistency violations
//! such as disagreement between independent index methods.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Malformed input: non-square matrix, NaN/Inf entries, dimension mismatch.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Input outside the mathematical domain of the operation
    /// (e.g. a non-Hermitian matrix passed to a PSD square root).
    #[error("domain error: {0}")]
    Domain(String),

    /// A documented precondition does not hold (e.g. `hc_index` on a
    /// non-accretive matrix; callers are pointed at the shifted variant).
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A resolvent or linear system is numerically singular.
    #[error("singular transform: {reason} (blocking eigenvalue {eigenvalue_re}{eigenvalue_im:+}i)")]
    Singular {
        reason: String,
        eigenvalue_re: f64,
        eigenvalue_im: f64,
    },

    /// A discrete decision (rank, definiteness, index) sits inside the
    /// tolerance band; candidates are listed instead of guessing.
    #[error("indeterminate decision: {context}; candidates {candidates:?}")]
    Indeterminate {
        context: String,
        candidates: Vec<usize>,
    },

    /// Independent computation routes disagree beyond what tolerances explain.
    #[error("internal consistency violation: {0}")]
    Internal(String),

    /// Iterative numerics failed (eigensolver stall, series divergence, overflow).
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Least-squares decay fit had no usable samples.
    #[error("fit failure: {0}")]
    FitFailure(String),
}

pub type Result<T> = std::result::Result<T, Error>;
