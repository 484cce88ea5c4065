use thiserror::Error;

/// Every fallible operation in the crate reports one of these.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VirError {
    #[error("parameter t must be nonzero")]
    ZeroParameter,
    #[error("central charge {0} has no rational parameter t")]
    IrrationalRoots(String),
    #[error("operands live over different central charges or scalar fields")]
    ContextMismatch,
    #[error("element is not decomposable: {0}")]
    NotDecomposable(String),
    #[error("inconsistent linear system: {0}")]
    InconsistentSystem(String),
    #[error("solution is not unique: {0}")]
    NonUniqueSolution(String),
    #[error("invariant form is degenerate: {0}")]
    NormDegenerate(String),
    #[error("invariant undefined: {0}")]
    UndefinedInvariant(String),
    #[error("no data realises the requested invariants: {0}")]
    NoSolution(String),
    #[error("operation requires a rational value of t")]
    NonRationalT,
    #[error("invalid module: {0}")]
    InvalidModule(String),
    #[error("modules are incompatible: {0}")]
    Incompatible(String),
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, VirError>;
