//! Error type shared by every layer of the crate.

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes surfaced by constructors, iteration, and detectors.
///
/// `Budget` is reserved for computations that are well-posed but exceed a
/// stated resource bound (window width, state-set cap, path-count overflow).
/// Detector verdicts never travel through this type: an inconclusive probe
/// is a value, not an error.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A system description or run configuration failed validation.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// An operation received arguments outside its documented domain.
    #[error("invalid input: {0}")]
    Input(String),

    /// A well-posed computation exceeded an explicit resource bound.
    #[error("budget exceeded: {0}")]
    Budget(String),

    /// The operation is not defined for the given system family.
    #[error("unsupported operation: {0}")]
    Unsupported(String),

    /// Report serialization or file I/O failed.
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// True when the error signals a resource bound rather than bad input.
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::Budget(_))
    }
}
