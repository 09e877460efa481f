use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(usize, usize),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ForestError {
    #[error("parent {parent} of vertex {vertex} is out of range")]
    ParentOutOfRange { vertex: usize, parent: usize },
    #[error("parent pointers contain a cycle through vertex {0}")]
    Cycle(usize),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RingError {
    #[error("modulus must be at least 2")]
    InvalidModulus,
    #[error("inversion requires a prime modulus")]
    NotAField,
    #[error("denominator vanished")]
    DenominatorVanished,
    #[error("polynomial caps differ ({0} vs {1})")]
    CapMismatch(usize, usize),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CountError {
    #[error("auxiliary forest has {forest} vertices but the graph has {graph}")]
    SizeMismatch { graph: usize, forest: usize },
    #[error("auxiliary forest is not an elimination forest of the graph")]
    NotEliminationForest,
    #[error("graph must be connected and non-empty")]
    NotConnected,
    #[error("weight vector has length {got}, expected {expected}")]
    WeightLength { expected: usize, got: usize },
    #[error("depth budget {d} times auxiliary depth {k} exceeds the supported prefix size 128")]
    PrefixTooLarge { d: usize, k: usize },
    #[error("deadline exceeded")]
    DeadlineExceeded,
    #[error(transparent)]
    Ring(#[from] RingError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("brute force supports at most {max} vertices, got {n}")]
    TooLarge { n: usize, max: usize },
}

#[derive(Debug, Error)]
pub enum PaceError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: vertex {vertex} out of range 1..={n}")]
    IndexOutOfRange { line: usize, vertex: usize, n: usize },
    #[error("header announces {expected} edges but {found} were read")]
    EdgeCount { expected: usize, found: usize },
    #[error("missing `p tdp` header")]
    MissingHeader,
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Forest(#[from] ForestError),
}
