use thiserror::Error;

use crate::exactla::LaError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error(transparent)]
    Linear(#[from] LaError),
    #[error("signature mismatch")]
    SignatureMismatch,
    #[error("invalid signature: {0}")]
    Signature(String),
    #[error("generator {generator}: entry ({row},{col}) is not homogeneous of the generator degree")]
    Inhomogeneous { generator: String, row: usize, col: usize },
    #[error("invalid object: {0}")]
    Object(String),
    #[error("not a morphism: {0}")]
    NotMorphism(String),
    #[error("not exact: {0}")]
    NotExact(String),
    #[error("endpoint mismatch: {0}")]
    Endpoint(String),
    #[error("invalid generalized extension: {0}")]
    GenExt(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("search bound exceeded: {0}")]
    Bound(String),
}

pub type Result<T> = std::result::Result<T, Error>;
