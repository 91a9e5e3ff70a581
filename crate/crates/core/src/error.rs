use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Everything the library can reject.
///
/// [`Error::InvariantViolation`] is the only variant that signals a bug in
/// this crate rather than bad input; front-ends map it to a distinct exit
/// status.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("basis string has width {got}, layout expects {expected}")]
    WidthMismatch { expected: usize, got: usize },
    #[error("amplitudes are not normalized (squared norm {0})")]
    NotNormalized(f64),
    #[error("matrix is not unitary (max deviation of U†U from I is {0:.3e})")]
    NonUnitary(f64),
    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NonHermitian(f64),
    #[error("qubit {qubit} is out of range for a {width}-qubit state")]
    QubitOutOfRange { qubit: usize, width: usize },
    #[error("qubit {0} is both control and target")]
    ControlOverlapsTarget(usize),
    #[error("basis map is not a bijection: {0}")]
    NotBijective(String),
    #[error("pairing is not a matching: {0}")]
    OverlappingPairs(String),
    #[error("unknown register `{0}`")]
    UnknownRegister(String),
    #[error("states have different layouts")]
    LayoutMismatch,
    #[error("problem too large: {0}")]
    TooLarge(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("internal invariant violated: {0}")]
    InvariantViolation(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// True for errors caused by the caller, false for internal failures.
    pub fn is_user_error(&self) -> bool {
        !matches!(self, Error::InvariantViolation(_))
    }
}
