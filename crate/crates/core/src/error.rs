use thiserror::Error;

use crate::graph::Edge;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("loop at vertex {0}")]
    Loop(usize),

    #[error("duplicate edge ({}, {})", .0.u, .0.v)]
    DuplicateEdge(Edge),

    #[error("vertex {vertex} out of range 1..={n}")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("cycle graph needs at least 3 vertices, got {0}")]
    CycleTooSmall(usize),

    #[error("no length for edge ({}, {})", .0.u, .0.v)]
    MissingLength(Edge),

    #[error("length {length} on edge ({}, {}) is not a positive finite number", .edge.u, .edge.v)]
    NonPositiveLength { edge: Edge, length: f64 },

    #[error("graph is disconnected")]
    Disconnected,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal {off:e})")]
    NoConvergence { sweeps: usize, off: f64 },

    #[error("test function is identically zero")]
    ZeroFunction,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid involution: {0}")]
    InvalidInvolution(String),

    #[error("explicit block form needs even n >= 4, got {0}")]
    OddCycle(usize),

    #[error("slope fit needs at least 3 points, got {0}")]
    TooFewPoints(usize),

    #[error("slope fit needs positive data, got ({0}, {1})")]
    NonPositiveData(f64, f64),

    #[error("vertex {vertex} has degree {degree}, expected a pendant vertex")]
    NotPendant { vertex: usize, degree: usize },

    #[error("vertex {vertex} has degree {degree}, a cut needs degree >= 2")]
    DegreeTooSmall { vertex: usize, degree: usize },

    #[error("edge ({}, {}) is not incident to vertex {vertex}", .edge.u, .edge.v)]
    EdgeNotIncident { edge: Edge, vertex: usize },

    #[error("invalid cut: cutting vertex {vertex} keeping ({}, {}) disconnects the graph", .keep.u, .keep.v)]
    InvalidCut { vertex: usize, keep: Edge },

    #[error("graph has no cycle")]
    NoCycle,
}
