//! View concept models, their generated schemas, and view content.

mod content;
pub mod geometry;
mod model;
mod schema;

pub use content::{BadElementKey, Element, ElementKey, ViewContent};
pub use model::{
    builtin_views, parse_view_models, print_view_model, Concept, FieldDecl, ViewConceptModel, ViewModelError,
};
pub use schema::{emit_schema, validate_content, ViewSchema};
