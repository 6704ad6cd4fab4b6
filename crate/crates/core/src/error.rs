use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Argument outside the mathematical domain of a function.
    #[error("{func}: argument {value} outside domain ({expected})")]
    Domain {
        func: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("invalid inequality variant {0} (expected 0..=3)")]
    InvalidVariant(usize),

    #[error("negative probability operand `{name}` = {value}")]
    NegativeInput { name: &'static str, value: f64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("{what} did not converge within {budget} evaluations (error estimate {estimate:e})")]
    NoConvergence {
        what: &'static str,
        budget: usize,
        estimate: f64,
    },

    #[error("root not bracketed on [{lo}, {hi}]")]
    RootNotBracketed { lo: f64, hi: f64 },

    #[error("grid of {points} points exceeds the guard of {limit}")]
    GuardExceeded { points: u128, limit: u128 },

    #[error("evaluation failed at {point:?}: {source}")]
    Evaluator {
        point: Vec<(String, f64)>,
        #[source]
        source: Box<Error>,
    },
}
