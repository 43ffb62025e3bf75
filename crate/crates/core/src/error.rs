use thiserror::Error;

/// Errors raised by the computational modules.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid group spec: {0}")]
    InvalidSpec(String),

    #[error("invalid element: {0}")]
    InvalidElement(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("enumeration over an infinite group needs an explicit cap")]
    NeedsCap,

    #[error("class group has free rank {0}; a coordinate box is required to list classes")]
    NeedsBox(usize),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid localization: {0}")]
    InvalidLocalization(String),

    #[error("outside hypothesis: {0}")]
    OutOfHypothesis(String),

    #[error("group of order {order} exceeds the subset-sweep guard of {guard}; the guard can be raised up to 20")]
    GuardExceeded { order: u64, guard: u64 },

    #[error("AAMP survey failure on {sequence} with length set {lengths:?}")]
    SurveyFailure { sequence: String, lengths: Vec<usize> },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidSpec(_) => "invalid-spec",
            Error::InvalidElement(_) => "invalid-element",
            Error::InvalidInput(_) => "invalid-input",
            Error::NeedsCap => "needs-cap",
            Error::NeedsBox(_) => "needs-box",
            Error::Unsupported(_) => "unsupported",
            Error::InvalidLocalization(_) => "invalid-localization",
            Error::OutOfHypothesis(_) => "out-of-hypothesis",
            Error::GuardExceeded { .. } => "guard-exceeded",
            Error::SurveyFailure { .. } => "survey-failure",
            Error::Parse(_) => "parse",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
