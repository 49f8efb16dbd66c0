use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("{what} exceeds the configured cap ({requested} > {limit})")]
    Size {
        what: String,
        requested: usize,
        limit: usize,
    },

    #[error("state does not live on the Hamiltonian's basis")]
    BasisMismatch,

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("rank-deficient regression: {0}")]
    Rank(String),

    #[error("superatom ensemble is empty (every cell fell below n_min)")]
    EmptyEnsemble,

    #[error("parse error at line {line}{}: {msg}", column.map(|c| format!(", column {c}")).unwrap_or_default())]
    Parse {
        line: usize,
        column: Option<usize>,
        msg: String,
    },

    #[error("config key `{key}`: {msg}")]
    Config { key: String, msg: String },

    #[error("{count} saturation fit(s) did not converge")]
    NonConvergence { count: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.into(),
            reason: reason.into(),
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NonConvergence { .. } => 3,
            Error::Size { .. } => 4,
            _ => 2,
        }
    }
}
