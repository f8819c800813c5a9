use thiserror::Error;

use crate::pseudotranscript::FactorizationWitness;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{what} count {count} exceeds the configured cap {cap}")]
    SizeLimit {
        what: &'static str,
        count: u128,
        cap: u128,
    },

    #[error("invalid {field}: {reason}")]
    Parse { field: String, reason: String },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("outcome {outcome} does not factorize: {witness}")]
    NotFactorizable {
        outcome: usize,
        witness: FactorizationWitness,
    },

    #[error("linear program is {0}")]
    LpStatus(&'static str),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Parse {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
}
