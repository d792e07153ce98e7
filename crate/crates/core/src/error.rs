use thiserror::Error;

/// Errors raised by every fallible operation in the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid interval system: {0}")]
    InvalidSystem(String),
    #[error("invalid weight: {0}")]
    InvalidWeight(String),
    #[error("point {0} lies on the set E")]
    OnSet(String),
    #[error("point {0} is outside the admissible region")]
    OutsideDomain(String),
    #[error("quadrature did not converge (estimate {estimate:e}, requested {requested:e})")]
    Quadrature { estimate: f64, requested: f64 },
    #[error("singular linear system in {0}")]
    Singular(&'static str),
    #[error("no convergence in {what} after {iterations} iterations (residual {residual:e})")]
    NoConvergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
