use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("negative probability {prob} at value {value}")]
    NegativeProbability { value: usize, prob: f64 },
    #[error("probability mass sums to {total}, expected 1")]
    MassNotOne { total: f64 },
    #[error("distribution has no positive mass")]
    EmptySupport,
    #[error("distribution has zero mean")]
    ZeroMean,
    #[error("invalid threshold: {0}")]
    InvalidThreshold(String),
    #[error("model assumption violated: {0}")]
    AssumptionViolated(String),
    #[error("input sequence is not sorted in non-decreasing order")]
    UnsortedInput,
    #[error("invalid clique outcome: {0}")]
    InvalidOutcome(String),
    #[error("enumeration of {count} tuples exceeds the limit of {limit}")]
    EnumerationTooLarge { count: f64, limit: u64 },
    #[error("{what} did not converge: bracket [{lower}, {upper}]")]
    NoConvergence {
        what: &'static str,
        lower: f64,
        upper: f64,
    },
    #[error("vertex count overflowed at depth {depth}")]
    CountOverflow { depth: usize },
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
}
