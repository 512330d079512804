use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed user input: wrong table length, bad index, unparsable spec.
    #[error("invalid input: {0}")]
    Input(String),

    /// A mathematical precondition does not hold (not PSD, trace not 1, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A value would overflow double precision outside log-domain mode.
    #[error("range error: {0}")]
    Range(String),

    /// An iterative method failed to converge or to certify its answer.
    #[error("numeric error in {context}: {detail}")]
    Numeric { context: String, detail: String },

    /// A result contradicts an invariant that should hold by construction.
    #[error("logic error: {0}")]
    Logic(String),
}

impl Error {
    pub(crate) fn numeric(context: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::Numeric {
            context: context.into(),
            detail: detail.into(),
        }
    }
}
