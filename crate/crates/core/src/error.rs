use thiserror::Error;

/// Errors raised while building or evaluating algebraic structures.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("ell must be odd and at least 3, got {0}")]
    EvenOrSmallEll(u32),
    #[error("division by zero")]
    DivisionByZero,
    #[error("[{0}]_q! vanishes and cannot be inverted")]
    ZeroQFactorial(u32),
    #[error("the Cartan pairing is degenerate modulo ell")]
    NonInvertibleForm,
    #[error("sublattice does not split the torus: {0}")]
    BadSublattice(String),
    #[error("torus tensor is singular at idempotent {witness:?}")]
    SingularTorusTensor { witness: Vec<u32> },
    #[error("ell = {ell} is not coprime to the lattice index {index}")]
    EllNotCoprime { ell: u32, index: i64 },
    #[error("dimension {dim} exceeds the limit {limit}")]
    DimensionTooLarge { dim: usize, limit: usize },
    #[error("twist pair failed verification: {0}")]
    TwistInvalid(String),
    #[error("gauge element rejected: {0}")]
    BadGauge(String),
    #[error("arrow data is not a groupoid: {0}")]
    NotAGroupoid(String),
    #[error("ell = {ell} shares a factor with det(cartan) = {det}")]
    CoprimalityViolation { ell: u32, det: i64 },
    #[error("unsupported Cartan type: {0}")]
    UnsupportedType(String),
    #[error("Lambda is not generic: {0}")]
    NonGenericLambda(String),
    #[error("id - T is not invertible on the orthogonal lattice")]
    SingularZ,
    #[error("element is not unitriangular: {0}")]
    NotUnitriangular(String),
    #[error("map does not preserve the inner product: {0}")]
    NotInnerProductPreserving(String),
    #[error("rank deficient at {0}")]
    RankDeficient(String),
    #[error("invalid run specification: {0}")]
    InvalidSpec(String),
    #[error("element is not invertible: {0}")]
    NotInvertible(String),
}

pub type Result<T> = std::result::Result<T, Error>;
