use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("exponent must satisfy p > 1, got {0}")]
    InvalidExponent(f64),
    #[error("value must be nonnegative, got {0}")]
    Negative(String),
    #[error("exact backend cannot represent x^{0}; use an integer exponent or the float backend")]
    InexactPower(f64),
    #[error("{0} is not representable on this backend")]
    Unrepresentable(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("{what}: size {size} exceeds the limit of {limit}")]
    Capability {
        what: &'static str,
        size: usize,
        limit: usize,
    },
    #[error("parse error: {0}")]
    Parse(String),
}
