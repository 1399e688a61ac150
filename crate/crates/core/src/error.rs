use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("sparsity error: s = {s} exceeds n = {n}")]
    Sparsity { s: usize, n: usize },
    #[error("parse error in field `{field}`: {msg}")]
    Parse { field: String, msg: String },
    #[error("invalid schedule: {0}")]
    Schedule(String),
    #[error("size error: n = {n} exceeds the exhaustive cap {cap}; use a heuristic backend (sa or local)")]
    Size { n: usize, cap: usize },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("numeric error: {0}")]
    Numeric(String),
    #[error("range error: {0}")]
    Range(String),
    #[error("capacity error: clique of size {k} does not fit a cell with half-size {t}")]
    Capacity { k: usize, t: usize },
    #[error("embedding error: {0}")]
    Embedding(String),
    #[error("degenerate column {0}: zero norm")]
    DegenerateColumn(usize),
    #[error("combinatorial cap exceeded: {count} subsets > cap {cap}")]
    Cap { count: u128, cap: u128 },
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn dim(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }

    pub(crate) fn parse(field: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Parse {
            field: field.into(),
            msg: msg.into(),
        }
    }

    /// True for errors raised by solvers or combinatorial size guards rather
    /// than by malformed input.
    pub fn is_solver_error(&self) -> bool {
        matches!(
            self,
            Error::Size { .. }
                | Error::Cap { .. }
                | Error::Numeric(_)
                | Error::Capacity { .. }
        )
    }
}
