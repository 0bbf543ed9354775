use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unknown {kind} `{name}` (known: {known})")]
    UnknownName {
        kind: &'static str,
        name: String,
        known: String,
    },

    #[error("propagator does not match the symmetric modulus pattern (max deviation {max_deviation:.3e} > tolerance {tolerance:.3e})")]
    PatternMismatch { max_deviation: f64, tolerance: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
