use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("exponent must be at least 1")]
    ZeroExponent,
    #[error("{0} is not a unit")]
    NotAUnit(u64),
    #[error("matrix is {rows}x{cols}, not square")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not skew-symmetric")]
    NotSkew,
    #[error("odd size {0}")]
    OddSize(usize),
    #[error("d∘d is nonzero at degree {0}")]
    NotAComplex(i64),
    #[error("element is not a single unit basis element")]
    NotBasisUnit,
    #[error("degree sum {sum} is not below sequence length {m}")]
    DegreeBound { sum: usize, m: usize },
    #[error("denominator {0} is not a unit at the given point")]
    NotDefinedAt(usize),
    #[error("limit undefined: {0}")]
    LimitUndefined(String),
    #[error("enumeration exceeded cap {0}")]
    CapExceeded(usize),
    #[error("cannot embed rank {r} into rank {s}")]
    RankOrder { r: usize, s: usize },
    #[error("matrix is not an odd symplectic element")]
    NotOddSymplectic,
    #[error("skew matrix is degenerate")]
    NotNondegenerate,
    #[error("size {q} exceeds 2n+1 = {bound}")]
    RankBound { q: usize, bound: usize },
    #[error("input sequence is not non-degenerate unimodular")]
    InputNotNondegenerate,
    #[error("incompatible coefficients: {0}")]
    IncompatibleCoefficients(String),
    #[error("module is not finite")]
    InfiniteModule,
    #[error("dimension mismatch: {0}")]
    Shape(String),
}

pub type Result<T> = std::result::Result<T, Error>;
