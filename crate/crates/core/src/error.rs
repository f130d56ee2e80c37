use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("bisection failed to bracket the level {level:e} (survival function is broken?)")]
    BracketFailure { level: f64 },

    #[error("quadrature did not reach tolerance: estimate {estimate:e}, error {error:e}")]
    QuadratureFailure { estimate: f64, error: f64 },

    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("markov chain is reducible: stationary distribution is not unique")]
    ReducibleChain,

    #[error("coefficients fail summability with delta = {delta}: {reason}")]
    NotSummable { delta: f64, reason: String },

    #[error("only {hits} numerator hits (need at least {required}); estimate {estimate} is unreliable")]
    InsufficientHits {
        hits: u64,
        required: u64,
        estimate: f64,
    },

    #[error("replication failed at n = {n}, replication {replication}: {source}")]
    Replication {
        n: usize,
        replication: usize,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
