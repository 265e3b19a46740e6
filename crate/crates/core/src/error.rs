use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// The search hit its node budget. Nothing partial is ever returned.
    #[error("budget exceeded: {what} needs more than {limit} nodes")]
    BudgetExceeded { what: String, limit: u64 },

    #[error("cap exceeded: {0}")]
    CapExceeded(String),

    #[error("not divisible: {0}")]
    NotDivisible(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A sweep could not finish every subset, so an exact answer is unavailable.
    #[error("incomplete result: {0}")]
    Incomplete(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub fn budget(what: impl Into<String>, limit: u64) -> Self {
        Error::BudgetExceeded {
            what: what.into(),
            limit,
        }
    }

    /// Short machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse(_) => "parse",
            Error::Domain(_) => "domain",
            Error::BudgetExceeded { .. } => "budget-exceeded",
            Error::CapExceeded(_) => "cap-exceeded",
            Error::NotDivisible(_) => "not-divisible",
            Error::Precondition(_) => "precondition",
            Error::Incomplete(_) => "incomplete",
            Error::Io(_) => "io",
        }
    }

    pub fn is_budget(&self) -> bool {
        matches!(self, Error::BudgetExceeded { .. } | Error::Incomplete(_))
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
