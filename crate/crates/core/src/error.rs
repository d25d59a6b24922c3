use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("root finder did not converge (max backward error {0:e})")]
    NonConvergence(f64),
    #[error("lambda is singular at gamma = {0}")]
    LambdaSingular(Complex64),
    #[error("quasi-energy vanishes; use the null-space route")]
    EpsilonZero,
    #[error("mode vector is self-orthogonal (exceptional point)")]
    SelfOrthogonal,
    #[error("degenerate quasi-momentum: sin k = 0")]
    DegenerateMomentum,
    #[error("trigonometric form singular at k = {0}")]
    TrigSingular(Complex64),
    #[error("mode basis is defective (orthogonality residual {0:e})")]
    DefectiveBasis(f64),
    #[error("gamma/lambda map singular")]
    MapSingular,
    #[error("Jordan chain residual too large ({0:e})")]
    ChainResidualTooLarge(f64),
    #[error("Jordan basis is singular (condition number {0:e})")]
    SingularVep(f64),
    #[error("zero vector")]
    ZeroVector,
    #[error("grid cell sits on a pole at gamma = {0}")]
    PoleCell(Complex64),
    #[error("ambiguous continuation near gamma = {0}")]
    AmbiguousContinuation(Complex64),
    #[error("chain length {0} exceeds the limit {1}")]
    SizeLimit(usize, usize),
    #[error("eigensolver did not converge")]
    EigenNoConvergence,
    #[error("closed form requires a limit at gamma = {0}")]
    LimitRequired(Complex64),
    #[error("eigenvalue clustering is ambiguous (gap {0:e})")]
    ClusterAmbiguity(f64),
    #[error("vacuum not found: {0}")]
    VacuumNotFound(String),
    #[error("state count mismatch: expected {expected}, got {got}")]
    CardinalityMismatch { expected: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
