use thiserror::Error;

/// Errors produced anywhere in the pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degenerate truncation: every singular value is below the cutoff")]
    DegenerateTruncation,

    #[error("no convergence in {context} after {iterations} iterations (best residual {residual:.3e})")]
    Convergence {
        context: String,
        iterations: usize,
        residual: f64,
    },

    #[error("degenerate state: {0}")]
    DegenerateState(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("degenerate process: {0}")]
    DegenerateProcess(String),

    #[error("invalid gram matrix: smallest eigenvalue {0:.3e}")]
    InvalidGram(f64),

    #[error("config error: {0}")]
    Config(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// Prefix a convergence error with where it happened; other variants pass through.
    pub fn with_context(self, ctx: &str) -> Self {
        match self {
            Error::Convergence {
                context,
                iterations,
                residual,
            } => Error::Convergence {
                context: format!("{ctx}: {context}"),
                iterations,
                residual,
            },
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
