use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("variable {index} out of range for {n} variables")]
    VariableOutOfRange { index: usize, n: usize },
    #[error("pairwise term on ({0}, {0}) is a self-pair")]
    SelfPair(usize),
    #[error("non-finite coefficient in term for {0}")]
    NonFinite(String),
    #[error("labeling has {got} entries, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("labeling is incomplete: variable {0} is unlabeled")]
    Incomplete(usize),
    #[error("brute force is capped at {cap} variables, got {n}")]
    TooManyVariables { n: usize, cap: usize },
    #[error("negative variable edge ({u}, {v}) with capacity {capacity} in a submodular graph")]
    NegativeEdge { u: usize, v: usize, capacity: f64 },
    #[error("infeasible factor spec: {0}")]
    InfeasibleSpec(String),
    #[error("unknown solver `{0}`")]
    UnknownSolver(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
