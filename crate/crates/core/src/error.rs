use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    #[error("degenerate immersion: {0}")]
    DegenerateImmersion(String),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("degenerate eigenspace: {0}")]
    DegenerateEigenspace(String),
}

pub type Result<T, E = GeometryError> = std::result::Result<T, E>;
