use thiserror::Error;

/// Errors produced by the group backends and every set-level operation built on them.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid group parameters: {0}")]
    InvalidParameter(String),

    #[error("element encoding does not match the group context ({0})")]
    EncodingMismatch(String),

    #[error("operands belong to different group contexts")]
    CtxMismatch,

    #[error("coordinate overflow: the experiment left the checked 64-bit window")]
    Overflow,

    #[error("cannot parse element literal `{literal}`: {reason}")]
    Parse { literal: String, reason: String },

    #[error("set must be symmetric and contain the identity")]
    NotSymmetric,

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("budget exceeded: {what} ({limit})")]
    BudgetExceeded { what: &'static str, limit: u64 },

    #[error("unsupported for this backend: {0}")]
    Unsupported(String),

    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(literal: &str, reason: impl Into<String>) -> Self {
        Error::Parse {
            literal: literal.to_string(),
            reason: reason.into(),
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// True for errors that signal a configured cap or budget was hit rather than a failure.
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::BudgetExceeded { .. })
    }
}
