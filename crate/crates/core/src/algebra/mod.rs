//! Exact arithmetic in finite fields `F_{p^m}` and dense linear algebra over
//! them: rank, reduced row echelon form, linear solving, and deterministic
//! rank completion.

mod field;
mod matrix;

pub use field::{find_primitive_polynomial, FieldCtx, FieldElement, FieldJson};
pub use matrix::{Matrix, MatrixJson};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("characteristic {0} is not prime")]
    NonPrime(u64),
    #[error("extension degree must be >= 1")]
    ZeroDegree,
    #[error("field order {p}^{m} does not fit the supported range")]
    OrderOverflow { p: u64, m: usize },
    #[error("modulus must be monic of degree {expected}, got degree {got}")]
    BadModulusDegree { expected: usize, got: usize },
    #[error("modulus is not monic")]
    NonMonicModulus,
    #[error("modulus coefficient {0} is not reduced mod {1}")]
    BadCoefficient(u64, u64),
    #[error("modulus is reducible over F_{0}")]
    ReducibleModulus(u64),
    #[error("no primitive element available for this field order")]
    NoPrimitiveElement,
    #[error("element encoding {0} is out of range for field of order {1}")]
    ElementOutOfRange(u64, u64),
    #[error("inversion of zero")]
    ZeroInverse,
    #[error("discrete log of zero")]
    ZeroDlog,
    #[error("matrix is singular")]
    Singular,
    #[error("linear system is inconsistent")]
    Inconsistent,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("cannot complete rank {rank} + {extra} rows to rank {target}")]
    CompletionImpossible {
        rank: usize,
        extra: usize,
        target: usize,
    },
}
