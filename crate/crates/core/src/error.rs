use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum Error {
    #[error("line {line}: cannot parse {token:?} as a real number")]
    Parse { line: usize, token: String },

    #[error("line {line}: expected {expected} coordinates, found {found}")]
    DimensionMismatch {
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("line {line}: non-finite coordinate")]
    NonFinite { line: usize },

    #[error("point cloud needs dim >= 1")]
    ZeroDimension,

    #[error("degenerate input: need at least 2 points, got {0}")]
    Degenerate(usize),

    #[error("boundary matrix for {n} points does not fit in memory")]
    OutOfMemory { n: usize },

    #[error("step count overflows u64 for n = {0}")]
    StepOverflow(usize),

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
