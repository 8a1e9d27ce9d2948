use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("pair ({x}, {y}) out of range for side size {n}")]
    OutOfRange { x: usize, y: usize, n: usize },

    #[error("duplicate edge ({x}, {y})")]
    DuplicateEdge { x: usize, y: usize },

    #[error("codegree of vertex {0} with itself is not defined")]
    SameVertex(usize),

    #[error("vertex {v} out of range for side size {n}")]
    VertexOutOfRange { v: usize, n: usize },

    #[error("side size must be at least {min}, got {n}")]
    SideTooSmall { n: usize, min: usize },

    #[error("pair ({x}, {y}) is not open")]
    NotOpen { x: usize, y: usize },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid hypergraph: {0}")]
    InvalidHypergraph(String),

    #[error("side size {n} exceeds the exact search limit {limit}; use the heuristic search")]
    ExactLimit { n: usize, limit: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("graph contains a K_{{2,2}}; the process engine produced an invalid graph")]
    NotK22Free,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
