use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Carries the hyperplane vector on which the form is positive.
    #[error("not embeddable (slack {slack:e})")]
    NotEmbeddable { slack: f64, witness: Vec<f64> },

    #[error("degenerate configuration: {0}")]
    Degenerate(String),

    #[error("size limit exceeded: {0}")]
    SizeLimit(String),

    #[error("search failed after {attempts} attempts: {reason} (best residual {best_residual:e})")]
    SearchFailure {
        reason: String,
        attempts: usize,
        best_residual: f64,
    },

    #[error("not a simplex: {0}")]
    NotASimplex(String),

    #[error("verification failed: {message}")]
    Verification { message: String, residuals: Vec<f64> },

    #[error("certificate invalid: {0}")]
    CertificateInvalid(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        source: Box<Error>,
    },
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn at(self, stage: &'static str) -> Self {
        match self {
            e @ Error::Stage { .. } => e,
            e => Error::Stage {
                stage,
                source: Box::new(e),
            },
        }
    }

    /// Short kebab-case name, stable across releases.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid-input",
            Error::NotEmbeddable { .. } => "not-embeddable",
            Error::Degenerate(_) => "degenerate",
            Error::SizeLimit(_) => "size-limit",
            Error::SearchFailure { .. } => "search-failure",
            Error::NotASimplex(_) => "not-a-simplex",
            Error::Verification { .. } => "verification",
            Error::CertificateInvalid(_) => "certificate-invalid",
            Error::Internal(_) => "internal",
            Error::Stage { source, .. } => source.kind(),
        }
    }

    pub fn stage(&self) -> Option<&'static str> {
        match self {
            Error::Stage { stage, .. } => Some(stage),
            _ => None,
        }
    }

    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            e => e,
        }
    }
}
