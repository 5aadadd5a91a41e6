use std::collections::BTreeMap;
use std::sync::{Arc, Mutex, RwLock};

use thiserror::Error;

use super::graph::{ContextGraph, Edge, GraphError, Node, NodeId};
use super::project::DeltaOp;
use crate::metamodel::{validate_graph, DomainModel, ValidationReport};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PublishError {
    #[error("delta rejected: {}", join(.0))]
    Structure(Vec<GraphError>),
    #[error("delta rejected: resulting graph does not conform:\n{0}")]
    Invalid(ValidationReport),
}

fn join(errs: &[GraphError]) -> String {
    errs.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; ")
}

/// Applies `delta` to `g`, producing the next version. Atomic: any
/// structural error or conformance violation rejects the whole delta.
pub fn publish(dm: &DomainModel, g: &ContextGraph, delta: &[DeltaOp]) -> Result<ContextGraph, PublishError> {
    let (nodes, edges) = g.clone().into_parts();
    let mut nodes: BTreeMap<NodeId, Node> = nodes.into_iter().map(|n| (n.id.clone(), n)).collect();
    let mut edges: BTreeMap<_, Edge> = edges.into_iter().map(|e| (e.id.clone(), e)).collect();
    let mut errors = Vec::new();

    for op in delta {
        match op {
            DeltaOp::AddNode(n) => {
                if nodes.contains_key(&n.id) {
                    errors.push(GraphError::DuplicateNode(n.id.clone()));
                } else {
                    nodes.insert(n.id.clone(), n.clone());
                }
            }
            DeltaOp::RemoveNode(id) => {
                if nodes.remove(id).is_none() {
                    errors.push(GraphError::UnknownNode(id.clone()));
                }
            }
            DeltaOp::AddEdge(e) => {
                if edges.contains_key(&e.id) {
                    errors.push(GraphError::DuplicateEdge(e.id.clone()));
                } else {
                    edges.insert(e.id.clone(), e.clone());
                }
            }
            DeltaOp::RemoveEdge(e) => {
                if edges.remove(&e.id).is_none() {
                    errors.push(GraphError::UnknownEdge(e.id.clone()));
                }
            }
        }
    }

    let next = ContextGraph::build(g.version() + 1, nodes.into_values(), edges.into_values());
    match next {
        Err(mut errs) => {
            errors.append(&mut errs);
            Err(PublishError::Structure(errors))
        }
        Ok(_) if !errors.is_empty() => Err(PublishError::Structure(errors)),
        Ok(next) => {
            let report = validate_graph(dm, &next);
            if report.is_empty() {
                Ok(next)
            } else {
                Err(PublishError::Invalid(report))
            }
        }
    }
}

/// Versioned snapshot store. Readers take an `Arc` to a snapshot and never
/// block; publishes are serialized and totally ordered.
pub struct ContextStore {
    model: Arc<DomainModel>,
    history: RwLock<Vec<Arc<ContextGraph>>>,
    writer: Mutex<()>,
}

impl ContextStore {
    pub fn new(model: Arc<DomainModel>, initial: ContextGraph) -> Self {
        ContextStore { model, history: RwLock::new(vec![Arc::new(initial)]), writer: Mutex::new(()) }
    }

    pub fn model(&self) -> &Arc<DomainModel> {
        &self.model
    }

    pub fn current(&self) -> Arc<ContextGraph> {
        let h = self.history.read().expect("history lock poisoned");
        Arc::clone(h.last().expect("store always holds a snapshot"))
    }

    pub fn snapshot(&self, version: u64) -> Option<Arc<ContextGraph>> {
        let h = self.history.read().expect("history lock poisoned");
        h.iter().find(|g| g.version() == version).cloned()
    }

    pub fn publish(&self, delta: &[DeltaOp]) -> Result<Arc<ContextGraph>, PublishError> {
        self.publish_if(delta, |_| Ok::<(), PublishError>(()))
    }

    /// Like [`ContextStore::publish`], but the candidate snapshot must also
    /// pass `accept` before it becomes current.
    pub fn publish_if<E>(
        &self,
        delta: &[DeltaOp],
        accept: impl FnOnce(&ContextGraph) -> Result<(), E>,
    ) -> Result<Arc<ContextGraph>, E>
    where
        E: From<PublishError>,
    {
        let _w = self.writer.lock().expect("writer lock poisoned");
        let base = self.current();
        let next = Arc::new(publish(&self.model, &base, delta)?);
        accept(&next)?;
        self.history.write().expect("history lock poisoned").push(Arc::clone(&next));
        Ok(next)
    }
}
