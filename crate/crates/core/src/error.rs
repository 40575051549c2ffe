use thiserror::Error;

/// Errors raised by the solvers, operators and risk evaluators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("atom budget exceeded: {needed} > {budget}")]
    BudgetExceeded { needed: usize, budget: usize },

    #[error("incompatible strategy: {0}")]
    IncompatibleStrategy(String),

    #[error("no convergence after {iterations} iterations (last residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("policy iteration produced a non-monotone step at state {state} (drop {drop:e})")]
    NonMonotone { state: usize, drop: f64 },

    #[error("numerical breakdown: {0}")]
    Numerical(String),

    #[error("invalid instance: {}", .0.join("; "))]
    InvalidInstance(Vec<String>),
}

pub type Result<T> = std::result::Result<T, Error>;
