use thiserror::Error;

/// Errors raised by the geometric and categorical constructions.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("not a norm: {0}")]
    NotANorm(String),

    /// A checked bound did not hold. `bound` is the inequality being checked.
    #[error("precondition violated: {bound} (claimed {claimed}, computed {computed})")]
    Precondition {
        bound: String,
        claimed: String,
        computed: String,
    },

    #[error("dimension cap {cap} exceeded: {needed} needed for {what}")]
    CapExceeded {
        cap: usize,
        needed: usize,
        what: String,
    },

    #[error("schedule infeasible: {0}")]
    ScheduleInfeasible(String),

    #[error("linear program {0}")]
    Lp(String),

    #[error("parse error at {at}: {msg}")]
    Parse { at: String, msg: String },

    #[error("unknown reference `{0}`")]
    UnknownReference(String),

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn dim(context: &'static str, expected: usize, found: usize) -> Self {
        Error::DimensionMismatch {
            context,
            expected,
            found,
        }
    }

    pub(crate) fn bound(
        bound: impl Into<String>,
        claimed: impl std::fmt::Display,
        computed: impl std::fmt::Display,
    ) -> Self {
        Error::Precondition {
            bound: bound.into(),
            claimed: claimed.to_string(),
            computed: computed.to_string(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
