use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A structure failed its construction invariants.
    #[error("validation error: {0}")]
    Validation(String),

    /// A sum or integral did not reach the requested tolerance.
    #[error(
        "{what} did not converge: value {value:e}, estimated error {est_error:e} after {work} steps"
    )]
    Convergence {
        what: &'static str,
        value: f64,
        est_error: f64,
        work: usize,
    },

    /// The model cannot provide the requested quantity.
    #[error("capability error: {0}")]
    Capability(String),

    /// A reflection coefficient denominator vanished.
    #[error("numerical degeneracy: {0}")]
    Degenerate(String),

    #[error("{path}:{line}: {message}")]
    TableParse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("cannot read {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    /// True for errors caused by non-convergence rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Convergence { .. } | Error::Degenerate(_))
    }
}
