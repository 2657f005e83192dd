use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate line: points are (nearly) vertically aligned or coincident")]
    DegenerateLine,
    #[error("line does not cross the interior of the cell")]
    NoCrossing,
    #[error("cutting parameter r must exceed 1 (got {0})")]
    InvalidR(f64),
    #[error("weights must be strictly positive (got {0})")]
    NonPositiveWeight(f64),
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("invalid partition size t={t} for n={n}")]
    InvalidT { t: usize, n: usize },
    #[error("invalid sample size k={k} for n={n}")]
    InvalidK { k: usize, n: usize },
    #[error("input of {got} points exceeds the exact evaluator limit of {limit}")]
    TooLarge { got: usize, limit: usize },
    #[error("partition contains an empty cell")]
    EmptyCell,
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("{bad} of {total} rows are malformed (limit 1%)")]
    TooManyBadRows { bad: usize, total: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
