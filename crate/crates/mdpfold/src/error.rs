//! Crate-wide error type.

use crate::structure::Witness;
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("grid is not a valid symmetric grid: {0}")]
    AsymmetricGrid(String),

    #[error("kernel row (action {action}, state {state}) sums to {sum}, off by >= {tol}")]
    RowNotStochastic {
        action: usize,
        state: usize,
        sum: f64,
        tol: f64,
    },

    #[error("kernel row (action {action}, state {state}) has negative mass {value} at column {column}")]
    NegativeMass {
        action: usize,
        state: usize,
        column: usize,
        value: f64,
    },

    #[error("horizon {0} too short; need T >= 2 (terminal stage plus at least one decision)")]
    HorizonTooShort(usize),

    #[error("policy selects action {label} at stage {stage}, state index {state}, which is not in the action set")]
    UndefinedAction {
        stage: usize,
        state: usize,
        label: f64,
    },

    #[error("density is not normalized: sums to {0}")]
    NotNormalized(f64),

    #[error("model is not even ({condition} violated): {witness}")]
    NotEven {
        condition: &'static str,
        witness: Witness,
    },

    #[error("operation requires an integer grid")]
    NonIntegerGrid,

    #[error("discount factor {0} outside (0, 1)")]
    BadDiscount(f64),

    #[error("operation requires a time-homogeneous stage cost")]
    NotTimeHomogeneous,

    #[error("value {0} outside the admissible action range [{1}, {2}]")]
    OutOfRange(f64, f64, f64),

    #[error("assumption M0 violated: {0}")]
    AssumptionM0Violated(String),

    #[error("assumption M3 violated: {0}")]
    AssumptionM3Violated(String),

    #[error("parameters outside the counterexample regime: {0}")]
    ParameterOutOfRegime(String),

    #[error("precondition failed: {0}")]
    PreconditionFailed(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
