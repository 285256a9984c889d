use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("incompatible charts")]
    IncompatibleCharts,
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("duplicate variable `{0}` in chart")]
    DuplicateVariable(String),
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),
    #[error("not Hamiltonian: {0}")]
    NotHamiltonian(String),
    #[error("degenerate structure: {0}")]
    Degenerate(String),
    #[error("not closed: d(omega) = {0}")]
    NotClosed(String),
    #[error("not a potential: d(theta) - omega = {0}")]
    NotAPotential(String),
    #[error("not invariant under basis field {index}: Lie derivative = {residual}")]
    NotInvariant { index: usize, residual: String },
    #[error("not projectable: {0}")]
    NotProjectable(String),
    #[error("no invariant lift: {0}")]
    NoInvariantLift(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("not reducible: {0}")]
    NotReducible(String),
    #[error("not symplectic: {0}")]
    NotSymplectic(String),
    #[error("verification failed: {0}")]
    VerificationFailed(String),
    #[error("invalid arity: {0}")]
    Arity(String),
}

pub type Result<T> = std::result::Result<T, Error>;
