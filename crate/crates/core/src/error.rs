use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },

    #[error("{what} violated at {witness}")]
    Invariant { what: String, witness: String },

    #[error("{0}")]
    Config(String),

    #[error("non-monotone stencil at node (i={i}, j={j}): {reason}; try a finer nt")]
    Monotonicity { i: usize, j: usize, reason: String },

    #[error("solver did not converge after {iters} iterations (residual tail {tail:?})")]
    Divergence { iters: usize, tail: Vec<f64> },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn invariant(what: impl Into<String>, witness: impl Into<String>) -> Error {
        Error::Invariant { what: what.into(), witness: witness.into() }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } | Error::Config(_) | Error::Io(_) => 3,
            Error::Invariant { .. } | Error::Monotonicity { .. } => 1,
            Error::Divergence { .. } => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
