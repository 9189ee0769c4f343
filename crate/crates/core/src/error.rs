use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("matrix does not have full column rank")]
    RankDeficient,
    #[error("matrix is singular")]
    Singular,
    #[error("division by zero")]
    DivisionByZero,
    #[error("inexact division during back substitution at row {0}")]
    NotDivisible(usize),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid field data: {0}")]
    InvalidField(String),
    #[error("element is not integral")]
    NotIntegral,
    #[error("ideal is not integral")]
    IdealNotIntegral,
    #[error("the zero ideal is not representable")]
    ZeroIdeal,
    #[error("ideals are not coprime")]
    NotCoprime,
    #[error("prime {0} divides the polynomial discriminant")]
    RamifiedPrime(u64),
    #[error("matrix is not lower triangular with unit diagonal")]
    NotTriangular,
    #[error("module is not contained in O_K^m: {0}")]
    NotIntegralModule(String),
    #[error("bi-pseudo matrix entry ({0}, {1}) violates integrality")]
    BiPseudoIntegrality(usize, usize),
    #[error("lattice reduction quality bound failed: {0}")]
    ReductionBound(String),
    #[error("zero argument to euclidean step")]
    ZeroEuclid,
}
