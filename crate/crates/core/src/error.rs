use thiserror::Error;

use crate::group::Point;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("root finder did not converge after {iterations} iterations (residual {residual:e})")]
    RootFind { iterations: usize, residual: f64 },

    #[error("stencil at {point:?} leaves the tabulated box")]
    Stencil { point: Point },

    #[error("point {point:?} lies outside the tabulated box")]
    OutsideBox { point: Point },

    #[error("horizontal differential is singular at {point:?}")]
    SingularDifferential { point: Point },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("flow trajectory from {start:?} left the admissible box")]
    FlowEscaped { start: Point },

    #[error("ball chain clause {clause} failed at index {index}: {detail}")]
    ChainClause {
        clause: u8,
        index: usize,
        detail: String,
    },

    #[error("kernel Gram matrix is ill-conditioned (condition number {0:e})")]
    IllConditioned(f64),

    #[error("orientation check refused the input: {0}")]
    Refused(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
