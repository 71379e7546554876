use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{op} is undefined on [{lo}, {hi}]")]
    Domain { op: &'static str, lo: f64, hi: f64 },

    #[error("cannot split degenerate interval [{lo}, {hi}]")]
    CannotSplit { lo: f64, hi: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
