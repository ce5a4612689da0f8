use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("ambient dimension mismatch: {0} vs {1}")]
    AmbientMismatch(usize, usize),

    #[error("not a sublattice")]
    NotSublattice,

    #[error("infinite index: sublattice has rank {sub} but lattice has rank {full}")]
    InfiniteIndex { sub: usize, full: usize },

    #[error("matrix is not idempotent")]
    NotIdempotent,

    #[error("matrix is not square ({0}×{1})")]
    NotSquare(usize, usize),

    #[error("zero polynomial has no factorization")]
    ZeroPolynomial,

    #[error("polynomials are not coprime")]
    NotCoprime,

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("level {0} is not squarefree")]
    NotSquarefree(u64),

    #[error("lattice is not stable under the Hecke action: {0}")]
    NotStable(String),

    #[error("Hecke algebra closure failed: {0}")]
    ClosureFailure(String),

    #[error("separating element search exhausted after {0} candidates")]
    SeparationFailure(usize),

    #[error("congruence module of order {order} is not a perfect square ({context})")]
    NonSquareIndex { order: String, context: String },

    #[error("theorem-level invariant violated: {0}")]
    InvariantViolation(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("internal consistency check failed: {0}")]
    Internal(String),
}
