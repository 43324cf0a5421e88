use thiserror::Error;

/// Errors produced by tree construction, toll evaluation and the numerical routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("invalid tree: {0}")]
    InvalidTree(String),

    #[error("toll `{toll}` failed at vertex {vertex} (label {label}): {message}")]
    Toll {
        toll: String,
        vertex: usize,
        label: u32,
        message: String,
    },

    #[error("unknown toll `{0}`")]
    UnknownToll(String),

    #[error("inspection failed: {0}")]
    Inspection(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
