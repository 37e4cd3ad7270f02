use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    Dimension {
        context: String,
        expected: usize,
        found: usize,
    },

    #[error("invalid parameters: {0}")]
    Params(String),

    #[error("{what} is not closed: {detail}")]
    NotClosed { what: String, detail: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("singular system: {0}")]
    Singular(String),

    #[error("integration aborted at t = {t}: {reason}")]
    Integration { t: f64, reason: String },

    #[error("malformed input: {0}")]
    Input(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn dimension(context: impl Into<String>, expected: usize, found: usize) -> Self {
        Error::Dimension {
            context: context.into(),
            expected,
            found,
        }
    }
}
