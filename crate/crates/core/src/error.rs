use thiserror::Error;

use crate::dsl::ParseError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("a solid needs at least one constraint")]
    NoConstraints,

    #[error("affine map is singular (det = {0})")]
    SingularMap(f64),

    #[error("invalid box: {0}")]
    InvalidBox(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Parse(#[from] ParseError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
