//! Cooperation-context modelling for construction-site coordination.
//!
//! A fixed metamodel (actors, activities, artifacts) anchors user-declared
//! domain models; versioned context graphs conform to a domain model; rule
//! files generate per-trade view contents with trace links back to the
//! graph; and the sync engine turns a selection in one view into highlights
//! in every other view.

pub mod cli;
pub mod context;
pub mod metamodel;
pub mod server;
pub mod sync;
pub mod syntax;
pub mod transform;
pub mod value;
pub mod views;
