use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("pole at {location}: {detail}")]
    Pole { location: String, detail: String },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("solver error: {0}")]
    Solver(String),
    #[error("ill-posed: condition number {cond:.3e} exceeds {limit:.1e}")]
    IllPosed { cond: f64, limit: f64 },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("bracketing failed on [{lo}, {hi}]")]
    Bracket { lo: f64, hi: f64 },
    #[error("truncation failure: {0}")]
    Truncation(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn arg<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Argument(msg.into()))
}
