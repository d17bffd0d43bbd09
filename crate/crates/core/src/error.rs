use thiserror::Error;

use crate::chain::ValidationReport;

/// Errors produced by the analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),

    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),

    #[error("context index {index} out of range for {contexts} contexts")]
    ContextOutOfRange { index: usize, contexts: usize },

    #[error("context has length {found}, expected {expected}")]
    ContextLength { expected: usize, found: usize },

    #[error("invalid chain: {0}")]
    InvalidChain(ValidationReport),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid lumping: {0}")]
    InvalidLumping(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("expected a first-order chain, got order {0}")]
    NotFirstOrder(usize),

    #[error("n-step matrices are defined for n >= 1")]
    ZeroSteps,

    #[error("not unique: {count} recurrent classes {classes}")]
    NotUnique { count: usize, classes: String },

    #[error("linear system is singular to tolerance (pivot {pivot:e})")]
    Singular { pivot: f64 },

    #[error("start distribution is not invariant (residual {residual:e})")]
    NotInvariant { residual: f64 },

    #[error("fill distribution must be strictly positive; entry {index} is {value} (a zero entry can create an extra closed class)")]
    NonPositiveFill { index: usize, value: f64 },

    #[error("arity {requested} exceeds the oracle horizon cap {cap}")]
    HorizonExceeded { requested: usize, cap: usize },

    #[error("table of {entries} entries exceeds the budget of {budget}")]
    BudgetExceeded { entries: u128, budget: usize },

    #[error("infinite divergence at n = {n}: sequence {sequence} has positive process mass and zero model mass")]
    InfiniteDivergence { n: usize, sequence: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("infeasible instance sizes: {0}")]
    InfeasibleSizes(String),
}

pub type Result<T> = std::result::Result<T, Error>;
