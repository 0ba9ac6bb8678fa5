use crate::linalg::ProperReport;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("matrix has numerical rank {rank}, needs {required}")]
    RankDeficient { rank: usize, required: usize },
    #[error("matrix is not proper: {0}")]
    NotProper(ProperReport),
    #[error("iteration did not converge within {iterations} sweeps")]
    ConvergenceFailure { iterations: usize },
    #[error("dimension mismatch: {what} (expected {expected}, found {found})")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error(
        "{blocks} time-extension blocks are too few; need N >= N_r^(K-2) = {required} \
         so that the truncated block count N - N_r^(K-2) + 1 is positive"
    )]
    TooFewBlocks { blocks: usize, required: usize },
    #[error("diagonal product {product} is not unit")]
    DiagProductNotUnit { product: f64 },
    #[error("channel matrix {index} is not diagonal")]
    NotDiagonal { index: usize },
    #[error("user {user} realized average power {realized} exceeds budget {budget}")]
    PowerViolation {
        user: usize,
        realized: f64,
        budget: f64,
    },
    #[error("matrix entries are not finite")]
    NonFinite,
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
}
