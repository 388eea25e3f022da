use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("voter count must be positive")]
    EmptyElectorate,

    #[error("vote vector has length {got}, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("invalid vote {value} at position {position}; votes must be -1 or +1")]
    InvalidVote { position: usize, value: i64 },

    #[error("dimension mismatch: {left} voters vs {right} voters")]
    DimensionMismatch { left: usize, right: usize },

    #[error("n = {n} exceeds the dense limit of {limit} for this operation")]
    TooLarge { n: usize, limit: usize },

    #[error("invalid method: {0}")]
    InvalidMethod(String),

    #[error("voter index {index} out of range 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("{name} = {value} is out of range ({expected})")]
    OutOfRange {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("constant voting method: every pivotal count is zero")]
    ConstantFunction,

    #[error("no closed form for {0}; materialize a dense table instead")]
    NoClosedForm(String),

    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("line {line}: {message}")]
    Csv { line: u64, message: String },

    #[error("|S| = {size} is smaller than |B_k| = {required}")]
    HarperPrecondition { size: u64, required: u64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn out_of_range(name: &'static str, value: f64, expected: &'static str) -> Error {
    Error::OutOfRange {
        name,
        value,
        expected,
    }
}
