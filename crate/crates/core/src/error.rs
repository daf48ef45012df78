use thiserror::Error;

/// Errors raised by the moduli-surface numerics.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid exponent p = {0}: require 1 < p <= {max}", max = crate::MAX_EXPONENT)]
    InvalidExponent(f64),

    #[error("non-finite input: {name} = {value}")]
    NonFiniteInput { name: &'static str, value: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("root not unique: {sign_changes} sign changes found on the scan grid")]
    MultipleRoots { sign_changes: usize },

    #[error("fixed-point iteration diverged at iteration {iteration} (iterate {iterate})")]
    Diverged { iteration: usize, iterate: f64 },

    #[error("no root of the constraint in [1, sigma_p] at tau = {tau}")]
    NoRootInBracket { tau: f64 },

    #[error("negative base {base} under non-integer exponent {p}")]
    NegativeBase { base: f64, p: f64 },

    #[error("coincident points {0} and {1}")]
    CoincidentPoints(f64, f64),

    #[error("need at least {needed} distinct points, got {got}")]
    InsufficientPoints { needed: usize, got: usize },

    #[error("one-sided limit at x0 = {x0} is unstable")]
    UnstableLimit { x0: f64 },

    #[error("at tau = {tau}: {source}")]
    AtTau {
        tau: f64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// True for errors caused by bad caller input rather than numerical failure.
    pub fn is_usage(&self) -> bool {
        match self {
            Error::InvalidExponent(_)
            | Error::NonFiniteInput { .. }
            | Error::InvalidArgument(_)
            | Error::CoincidentPoints(..)
            | Error::InsufficientPoints { .. } => true,
            Error::AtTau { source, .. } => source.is_usage(),
            _ => false,
        }
    }

    pub(crate) fn at_tau(self, tau: f64) -> Error {
        match self {
            e @ Error::AtTau { .. } => e,
            e => Error::AtTau {
                tau,
                source: Box::new(e),
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
