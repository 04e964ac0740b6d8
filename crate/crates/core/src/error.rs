//! Shared error type for the whole crate.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("modulus mismatch: p = {left} vs p = {right}")]
    ModulusMismatch { left: u64, right: u64 },
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("linear system has no solution")]
    Infeasible,
    #[error("matrix does not have full row rank")]
    NotFullRank,
    #[error("form is not anti-symmetric")]
    NotAntiSymmetric,
    #[error("form is not symmetric")]
    NotSymmetric,
    #[error("tau = 1 + 2*sigma is singular")]
    TauSingular,
    #[error("T is singular")]
    SingularT,
    #[error("A and T must both be invertible")]
    SingularInput,
    #[error("2c + 1 = 0 mod p: the power form with c = -1/2 is excluded")]
    HalfExcluded,
    #[error("(A, T) does not satisfy the lifting criterion")]
    CriterionFails,
    #[error("constructed map failed verification: {0}")]
    VerificationFailed(String),
    #[error("resource bound exceeded: needed {needed}, bound {bound}")]
    BoundExceeded { needed: u128, bound: u128 },
    #[error("invalid group spec: field `{field}`: {message}")]
    InvalidSpec { field: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
