use thiserror::Error;

/// Errors surfaced by the library.
///
/// Variants marked "hard error" in the operation contracts indicate a broken
/// internal invariant (inconsistent double computations, inexact division,
/// non-equivariant operators); they are bugs if they ever fire on valid input.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("matrix shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("broken chain complex: {0}")]
    BrokenComplex(String),

    #[error("operator does not descend to the subquotient: {0}")]
    NotInduced(String),

    #[error("sl2 multiplicity routes disagree: {0}")]
    MultiplicityMismatch(String),

    #[error("inexact division: {0}")]
    InexactDivision(String),

    #[error("negative multiplicity: {0}")]
    NegativeMultiplicity(String),

    #[error("modular rank verification failed: {0}")]
    ModularMismatch(String),

    #[error("presentation data: {0}")]
    Presentation(String),

    #[error("cache: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
