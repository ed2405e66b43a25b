use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian (defect {defect:e})")]
    NotHermitian { defect: f64 },
    #[error("matrix is not positive semidefinite (min eigenvalue {min_eig:e})")]
    NotPsd { min_eig: f64 },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("group order must be at least 1")]
    ZeroOrder,
    #[error("table is not a Latin square")]
    NotLatinSquare,
    #[error("operation is not associative at ({0}, {1}, {2})")]
    NotAssociative(usize, usize, usize),
    #[error("table has no two-sided identity")]
    NoIdentity,
    #[error("size mismatch: {0}")]
    SizeMismatch(String),
    #[error("map is not a *-automorphism: {0}")]
    NotAutomorphism(String),
    #[error("maps do not form a group action: {0}")]
    NotAction(String),
    #[error("objects live over different bundles")]
    BundleMismatch,
    #[error("product left its fiber (residual {residual:e} at fiber {fiber})")]
    FiberEscape { fiber: usize, residual: f64 },
    #[error("block ({0}, {1}) is not in the required fiber")]
    BlockEscape(usize, usize),
    #[error("invalid bundle: {0}")]
    InvalidBundle(String),
    #[error("bundle is not unital")]
    NotUnital,
    #[error("bundle map is not positive definite (margin {margin:e})")]
    NotPositiveDefinite { margin: f64 },
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
    #[error("not a Hilbert module: {0}")]
    NotModule(String),
    #[error("vector must lie in fiber {expected}, got {got}")]
    WrongFiber { expected: usize, got: usize },
    #[error("compatibility condition fails: {0}")]
    CompatibilityViolation(String),
    #[error("not a *-representation: {0}")]
    NotStarRep(String),
    #[error("bundle map is not unitary: {0}")]
    NotUnitary(String),
    #[error("action does not match the module: {0}")]
    ActionMismatch(String),
    #[error("malformed input: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
