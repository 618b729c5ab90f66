use thiserror::Error;

#[derive(Error, Debug)]
pub enum SpinError {
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("valence mismatch: operator {op} expects valence {expected}, field has {found}")]
    ValenceMismatch {
        op: String,
        expected: String,
        found: usize,
    },
    #[error("convention check failed: {0}")]
    Convention(String),
    #[error("frame singularity: {0}")]
    FrameSingularity(String),
    #[error("non-membership: weighted norm diverges ({0})")]
    NormDivergence(String),
    #[error("resolution error: {0}")]
    Resolution(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("derivative order cap exceeded: requested {requested}, cap {cap}")]
    OrderCap { requested: usize, cap: usize },
    #[error("excluded weight: {0}")]
    ExcludedWeight(String),
    #[error("degenerate fit input: {0}")]
    FitInput(String),
}

pub type Result<T> = std::result::Result<T, SpinError>;
