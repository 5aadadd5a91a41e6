//! Versioned context graphs: ingestion, traversal and publishing.

mod graph;
mod project;
mod store;

pub use graph::{
    neighbors, walk, ContextGraph, Direction, Edge, EdgeId, GraphError, Node, NodeId, PathError, PathExpression,
    PathStep,
};
pub use project::{
    load_project, parse_delta, parse_project, print_delta, print_project, DeltaOp, IngestError, ProjectFile,
};
pub use store::{publish, ContextStore, PublishError};
