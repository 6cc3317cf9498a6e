use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid test function: {0}")]
    InvalidTestFunction(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("cell budget exceeded: block needs {needed} cells, budget is {budget}")]
    CellBudget { needed: usize, budget: usize },

    #[error("iteration budget exceeded: needs {needed} steps, budget is {budget}")]
    IterationBudget { needed: usize, budget: usize },

    #[error("quadrature did not converge within {nodes} nodes (last change {change:e})")]
    Quadrature { nodes: usize, change: f64 },

    #[error("invalid bound inputs: {0}")]
    InvalidBoundInputs(String),

    #[error("kernel validation failed: discrepancy {discrepancy:e} exceeds {limit:e}")]
    KernelValidation { discrepancy: f64, limit: f64 },

    #[error("grid budget exceeded: {points} points, budget is {budget}")]
    GridBudget { points: usize, budget: usize },

    #[error("power iteration did not converge in {0} iterations")]
    NoConvergence(usize),

    #[error("singular system: {0}")]
    Singular(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
