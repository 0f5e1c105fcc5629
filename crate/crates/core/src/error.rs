use thiserror::Error;

/// Errors produced by the library.
///
/// The variants map onto the CLI exit codes: invalid parameters are
/// configuration errors (2), resource limits are capacity errors (3) and
/// domain/region errors are request errors (4).
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("region error: {0}")]
    Region(String),
}

pub type Result<T> = std::result::Result<T, Error>;
