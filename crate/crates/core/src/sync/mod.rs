//! Selection to highlight propagation across views, and the shared
//! workspace that sessions run against.

mod propagate;
mod workspace;

pub use propagate::{
    correlation_closure, propagate, propagate_indexed, CorrelationConfig, HighlightDirective, SelectionEvent,
    SyncError, TraceIndex, DEFAULT_CORRELATION_KINDS, DEFAULT_MAX_HOPS,
};
pub use workspace::{render_document, Rendering, SessionSnapshot, Workspace, WorkspaceError};
