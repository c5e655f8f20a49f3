use thiserror::Error;

use crate::model::Violation;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("invalid parameters: {}", join(.0))]
    Invalid(Vec<Violation>),

    #[error("invalid initial data for {field}: {reason}")]
    InitialData { field: &'static str, reason: String },

    #[error("invalid simulation config: {0}")]
    SimConfig(String),

    #[error("certificate precondition failed: {0}")]
    Certificate(String),

    #[error("lower bound undefined: {0}")]
    LowerBound(String),

    #[error("{0}")]
    Verification(String),

    #[error("too few samples: need at least {needed}, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Config(String),

    #[error(transparent)]
    Cert(#[from] crate::certificates::CertificateError),
}

fn join(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
