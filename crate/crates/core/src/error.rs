use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("series truncated at order {have}, but order {needed} is required")]
    TruncationInsufficient { needed: i64, have: i64 },

    #[error("lowest-order coefficient `{coefficient}` is not a nonzero rational constant")]
    NonUnitLeadingCoefficient { coefficient: String },

    #[error("cannot substitute non-monomial `{binding}` into negative power of `{symbol}`")]
    NonInvertibleSubstitution { symbol: String, binding: String },

    #[error("negative exponent {exponent} on `{symbol}`: only rho may carry negative powers")]
    NegativeExponent { symbol: String, exponent: i32 },

    #[error("divisor is not monic in `{symbol}`")]
    NotMonic { symbol: String },

    #[error("down-step weight lambda must be nonzero ({context})")]
    ZeroLambda { context: String },

    #[error("background weights must be rational for this engine, got b = `{b}`, lambda = `{lambda}`")]
    SymbolicBackground { b: String, lambda: String },

    #[error("x0 = {x0} is within 1e-6 of the branch point |x| = 2")]
    NearBranchPoint { x0: f64 },

    #[error("enumeration size limit exceeded: {what} (cap {cap})")]
    SizeLimit { what: String, cap: u64 },

    #[error("cut position {c} out of range for order {k}")]
    CutOutOfRange { k: usize, c: usize },

    #[error("invalid query: {0}")]
    InvalidQuery(String),

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("need {needed} weights, got {got}")]
    InsufficientWeights { needed: usize, got: usize },

    #[error("truncation guard failed: {0}")]
    TruncationGuard(String),

    #[error("parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("write failed: {0}")]
    Io(String),

    #[error("schema error at {pointer}: {message}")]
    Schema { pointer: String, message: String },
}
