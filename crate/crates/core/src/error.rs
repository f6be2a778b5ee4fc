use thiserror::Error;

/// Errors raised by the library.
///
/// Verdicts (feasible/infeasible, passes/fails) are never errors; they are
/// returned as values. Errors mean the inputs could not be processed.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("not indicator-consistent at step {step}: {reason}")]
    NotIndicatorConsistent { step: String, reason: String },

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("json error in {context}: {source}")]
    Json {
        context: String,
        #[source]
        source: serde_json::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            location: location.into(),
            message: message.into(),
        }
    }

    pub(crate) fn inconsistent(step: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::NotIndicatorConsistent {
            step: step.into(),
            reason: reason.into(),
        }
    }
}
