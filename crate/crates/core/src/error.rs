use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("length mismatch in {context}: {left} vs {right}")]
    LengthMismatch {
        context: &'static str,
        left: usize,
        right: usize,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid code: {0}")]
    InvalidCode(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error("enumeration cap exceeded: {0}")]
    OracleCap(String),

    #[error("solver error: {0}")]
    Solver(String),

    /// An encoder or solver produced an answer that failed independent re-checking.
    #[error("internal soundness error: {0}")]
    Soundness(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn check_len(context: &'static str, left: usize, right: usize) -> Result<()> {
        if left == right {
            Ok(())
        } else {
            Err(Error::LengthMismatch {
                context,
                left,
                right,
            })
        }
    }
}
