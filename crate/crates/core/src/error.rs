use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("duplicate vertex label {0:?}")]
    DuplicateVertex(String),
    #[error("vertex index {index} out of range for {count} vertices")]
    VertexOutOfRange { index: usize, count: usize },
    #[error("self-loop at vertex {0:?}")]
    SelfLoop(String),
    #[error("duplicate edge {u:?}-{v:?}")]
    DuplicateEdge { u: String, v: String },
    #[error("edge {u:?}-{v:?} has weight 0; initial weights must be positive")]
    ZeroWeight { u: String, v: String },
    #[error("start index {index} out of range for {count} vertices")]
    BadStart { index: usize, count: usize },
    #[error("expected {expected} edge weights, found {found}")]
    WeightCount { expected: usize, found: usize },
    #[error("edge {u:?}-{v:?} weight exceeds its initial weight")]
    WeightAboveInitial { u: String, v: String },
}

/// Why a move was refused. The state is never modified when this is returned.
#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum IllegalMove {
    #[error("no edge to that vertex")]
    NoEdge,
    #[error("edge already removed")]
    EdgeRemoved,
    #[error("amount must be at least 1")]
    ZeroAmount,
    #[error("amount exceeds weight {weight}")]
    AmountExceedsWeight { weight: u32 },
}

/// Failure to read a graph document.
#[derive(Debug, Error)]
pub enum LoadError {
    #[error("malformed graph document at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("edge {edge}: unknown vertex label {label:?}")]
    UnknownLabel { edge: usize, label: String },
    #[error("unknown start vertex {0:?}")]
    UnknownStart(String),
    #[error("edge {edge}: weight must be a positive integer")]
    NonPositiveWeight { edge: usize },
    #[error(transparent)]
    Invalid(#[from] GraphError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CubeError {
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("dimension {n} exceeds the cap of {cap}")]
    TooLarge { n: u32, cap: u32 },
    #[error("uniform weight must be at least 1")]
    ZeroWeight,
    #[error("graph is not a hypercube")]
    NotACube,
    #[error("level {level} out of range 0..={n}")]
    LevelOutOfRange { level: u32, n: u32 },
    #[error("symmetry reduction supports dimension at most {cap}, got {n}")]
    SymmetryTooLarge { n: u32, cap: u32 },
}
