use thiserror::Error;

use crate::graph::{EdgeId, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("unknown edge {0}")]
    UnknownEdge(EdgeId),
    #[error("both endpoints are the same vertex {0}")]
    SameVertex(VertexId),
    #[error("loop at vertex {0}")]
    Loop(VertexId),
    #[error("edge {edge} is not incident with {vertex}")]
    NotIncident { edge: EdgeId, vertex: VertexId },
    #[error("the two edges are the same edge {0}")]
    SameEdge(EdgeId),
    #[error("contraction set does not induce a connected subgraph")]
    DisconnectedContractionSet,
    #[error("the two vertex sets do not intersect")]
    NonIntersectingSets,
    #[error("graph is not connected")]
    DisconnectedGraph,
    #[error("graph is not Eulerian")]
    NotEulerian,
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("no dangerous set found within the search bound")]
    NotFound,
    #[error("internal consistency failure, no admissible step: {0}")]
    Stuck(String),
    #[error("not verified at depth {depth}: {reason}")]
    NotVerified { depth: u32, reason: String },
    #[error("boundary is not contained in the truncation at depth {0}")]
    BoundaryNotFinite(u32),
    #[error("depth cap {cap} exhausted: {reason}")]
    DepthExhausted { cap: u32, reason: String },
    #[error("resource budget of {0} search nodes exceeded")]
    ResourceBudgetExceeded(u64),
    #[error("k must be even, got {0}")]
    OddK(usize),
    #[error("k must be odd, got {0}")]
    EvenK(usize),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

impl Error {
    /// Failures that only say "not established with the resources given",
    /// as opposed to disproofs or malformed input.
    pub fn is_non_authoritative(&self) -> bool {
        matches!(
            self,
            Error::NotFound
                | Error::NotVerified { .. }
                | Error::BoundaryNotFinite(_)
                | Error::DepthExhausted { .. }
                | Error::ResourceBudgetExceeded(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
