use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("malformed representation: {0}")]
    Malformed(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("evaluation point too close to a pole: {0}")]
    NearPole(String),
    #[error("infeasible contour geometry: {0}")]
    Geometry(String),
    #[error("accuracy target not reached: {0}")]
    Accuracy(String),
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "invalid-argument",
            Error::Malformed(_) => "malformed",
            Error::Domain(_) => "domain",
            Error::NearPole(_) => "near-pole",
            Error::Geometry(_) => "geometry",
            Error::Accuracy(_) => "accuracy",
            Error::ResourceLimit(_) => "resource-limit",
            Error::Parse(_) => "parse",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
