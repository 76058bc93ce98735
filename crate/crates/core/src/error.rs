use crate::numkernel::NumError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("operands live in different contexts (n = {left} vs n = {right})")]
    ContextMismatch { left: usize, right: usize },
    #[error("bidegree error: {0}")]
    Bidegree(String),
    #[error("positive form is not strictly positive (lambda_min = {lambda_min:.3e})")]
    NotStrictlyPositive { lambda_min: f64 },
    #[error("degree out of range: {0}")]
    DegreeOutOfRange(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("pair is not a verified Hodge-Riemann pair: {0}")]
    PairNotVerified(String),
    #[error("certificate inconsistency: {0}")]
    CertificateInconsistency(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("refused: {0}")]
    Refused(String),
    #[error(transparent)]
    Num(#[from] NumError),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
