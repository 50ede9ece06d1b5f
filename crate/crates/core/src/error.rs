use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("no hypotheses supplied")]
    Empty,

    #[error("length mismatch: {labels} labels, {p_values} p-values, {weights} weights")]
    LengthMismatch {
        labels: usize,
        p_values: usize,
        weights: usize,
    },

    #[error("p-value at index {index} is {value}, expected a value in [0, 1]")]
    PValueOutOfRange { index: usize, value: f64 },

    #[error("weight at index {index} is {value}, expected a finite value > 0")]
    InvalidWeight { index: usize, value: f64 },

    #[error("alpha is {0}, expected a value in (0, 1)")]
    InvalidAlpha(f64),

    #[error("{what} supports at most {cap} hypotheses, got {m}")]
    Capacity {
        what: &'static str,
        cap: usize,
        m: usize,
    },

    #[error("hypothesis {0} is not active in the graph")]
    InactiveNode(usize),

    #[error("invalid transition graph: {0}")]
    InvalidGraph(String),

    #[error("transition update divides by zero: g[{l}][{j}] * g[{j}][{l}] = 1")]
    DegenerateTransition { l: usize, j: usize },

    #[error("sample has zero variance")]
    DegenerateSample,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("input error: {0}")]
    Input(String),
}
