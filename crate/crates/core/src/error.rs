use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: String,
        expected: usize,
        found: usize,
    },
    #[error("invalid dilation exponents: {0}")]
    InvalidExponents(String),
    #[error("vector fields are linearly dependent over the rationals (rank {rank} < {m})")]
    LinearlyDependent { rank: usize, m: usize },
    #[error("invalid multi-index {word:?} for a system of {m} fields")]
    InvalidMultiIndex { word: Vec<usize>, m: usize },
    #[error("non-smooth point: {0}")]
    NonSmoothPoint(String),
    #[error("expression is not polynomial; exact evaluation unavailable")]
    NotPolynomial,
    #[error("jet order {order} exceeds the supported maximum {max}")]
    OrderTooHigh { order: usize, max: usize },
    #[error("division by zero")]
    DivisionByZero,
    #[error("expression parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("{path}: {msg}")]
    FileParse {
        path: String,
        line: usize,
        column: usize,
        msg: String,
    },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid input: {0}")]
    Format(String),
    #[error("empty family")]
    EmptyFamily,
    #[error("test function `{0}` does not have bounded support")]
    UnboundedSupport(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_dim(context: &str, expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch {
            context: context.to_string(),
            expected,
            found,
        });
    }
    Ok(())
}
