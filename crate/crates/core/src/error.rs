use thiserror::Error;

use crate::graph::VertexId;

#[derive(Debug, Error)]
pub enum Error {
    #[error("size budget exceeded: {0}")]
    Size(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("no path between {0} and {1}")]
    NoPath(VertexId, VertexId),
    #[error("out of range: {0}")]
    Range(String),
    #[error("embedding failed at tree vertex {tree_vertex} (generation {generation}, graph vertex {graph_vertex}): {reason}")]
    Embedding {
        tree_vertex: usize,
        generation: usize,
        graph_vertex: VertexId,
        reason: String,
    },
    #[error("computation touches the truncation frontier: {0}")]
    Frontier(String),
    #[error("inconsistent inputs: {0}")]
    Consistency(String),
    #[error("schema version mismatch for {kind}: expected {expected}, found {found}")]
    Version {
        kind: String,
        expected: u32,
        found: u32,
    },
    #[error("document kind mismatch: expected {expected}, found {found}")]
    Kind { expected: String, found: String },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
