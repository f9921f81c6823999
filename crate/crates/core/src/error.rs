use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Matrix or stalk dimensions do not fit together.
    #[error("shape error: {0}")]
    Shape(String),
    /// Malformed or inconsistent user input.
    #[error("input error: {0}")]
    Input(String),
    /// A structural invariant (poset axioms, functoriality, naturality) fails.
    #[error("violation: {0}")]
    Violation(String),
    /// An operation's precondition does not hold.
    #[error("precondition failed: {0}")]
    Precondition(String),
    /// The model does not behave as the two-strata theory requires
    /// (non-locally-constant cohomology, failed exactness, bad closed set).
    #[error("model error: {0}")]
    Model(String),
    /// A fill-in linear system has no solution.
    #[error("no fill-in: {0}")]
    NoFillIn(String),
    /// A statement that must hold for every valid input failed.
    #[error("theorem violation: {0}")]
    Theorem(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}
