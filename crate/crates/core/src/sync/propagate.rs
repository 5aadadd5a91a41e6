use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;

use crate::context::{ContextGraph, Direction, NodeId};
use crate::metamodel::DomainModel;
use crate::transform::TraceMap;
use crate::views::ElementKey;

/// Meta relation kinds whose domain relations carry correspondences by
/// default.
pub const DEFAULT_CORRELATION_KINDS: [&str; 3] = ["concerns", "refers_to", "produces"];
pub const DEFAULT_MAX_HOPS: u32 = 2;

/// Which relations link elements across views, and how far to follow them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CorrelationConfig {
    pub relations: BTreeSet<String>,
    pub max_hops: u32,
}

impl CorrelationConfig {
    pub fn new(relations: impl IntoIterator<Item = impl Into<String>>, max_hops: u32) -> Self {
        CorrelationConfig { relations: relations.into_iter().map(Into::into).collect(), max_hops }
    }

    /// Every domain relation of a default correlation kind, two hops.
    pub fn defaults_for(dm: &DomainModel) -> Self {
        CorrelationConfig {
            relations: dm
                .relations
                .iter()
                .filter(|r| DEFAULT_CORRELATION_KINDS.contains(&r.meta_relation.as_str()))
                .map(|r| r.name.clone())
                .collect(),
            max_hops: DEFAULT_MAX_HOPS,
        }
    }

    pub fn check(&self, dm: &DomainModel) -> Result<(), SyncError> {
        match self.relations.iter().find(|r| dm.relation(r).is_none()) {
            Some(r) => Err(SyncError::UnknownRelation(r.clone())),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SyncError {
    #[error("selection refers to graph version {got}, current is {current}")]
    Stale { current: u64, got: u64 },
    #[error("view `{view}` has no element `{key}`")]
    UnknownElement { view: String, key: ElementKey },
    #[error("unknown view `{0}`")]
    UnknownView(String),
    #[error("unknown session {0}")]
    UnknownSession(u64),
    #[error("arrangement is empty")]
    EmptyArrangement,
    #[error("view `{0}` appears twice in the arrangement")]
    DuplicateView(String),
    #[error("unknown role `{0}`")]
    UnknownRole(String),
    #[error("unknown correlation relation `{0}`")]
    UnknownRelation(String),
    #[error("content generation failed: {0}")]
    Generate(String),
}

impl SyncError {
    /// Stable identifier used in error messages on the wire.
    pub fn code(&self) -> &'static str {
        match self {
            SyncError::Stale { .. } => "stale_version",
            SyncError::UnknownElement { .. } => "unknown_element",
            SyncError::UnknownView(_) => "unknown_view",
            SyncError::UnknownSession(_) => "unknown_session",
            SyncError::EmptyArrangement => "empty_arrangement",
            SyncError::DuplicateView(_) => "duplicate_view",
            SyncError::UnknownRole(_) => "unknown_role",
            SyncError::UnknownRelation(_) => "unknown_relation",
            SyncError::Generate(_) => "generation_failed",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SelectionEvent {
    pub view_id: String,
    pub element_key: ElementKey,
    pub graph_version: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HighlightDirective {
    pub origin_view: String,
    pub origin_key: ElementKey,
    /// Every other view, each with the keys to highlight (possibly none).
    pub highlights: BTreeMap<String, BTreeSet<ElementKey>>,
    pub graph_version: u64,
}

/// Node id to the `(view, element)` pairs whose trace contains it.
#[derive(Debug, Clone, Default)]
pub struct TraceIndex {
    by_node: BTreeMap<NodeId, Vec<(String, ElementKey)>>,
}

impl TraceIndex {
    pub fn new(traces: &TraceMap) -> Self {
        let mut by_node: BTreeMap<NodeId, Vec<(String, ElementKey)>> = BTreeMap::new();
        for (view, t) in traces {
            for (key, nodes) in &t.elements {
                for n in nodes {
                    by_node.entry(n.clone()).or_default().push((view.clone(), key.clone()));
                }
            }
        }
        TraceIndex { by_node }
    }

    pub fn elements_at(&self, node: &NodeId) -> &[(String, ElementKey)] {
        self.by_node.get(node).map(Vec::as_slice).unwrap_or(&[])
    }
}

/// Nodes within `c.max_hops` of `seeds` over edges of the correlation
/// relations, followed in either direction. Seeds are included.
pub fn correlation_closure(
    g: &ContextGraph,
    seeds: impl IntoIterator<Item = NodeId>,
    c: &CorrelationConfig,
) -> BTreeSet<NodeId> {
    let mut seen: BTreeSet<NodeId> = BTreeSet::new();
    let mut queue: VecDeque<(NodeId, u32)> = VecDeque::new();
    for s in seeds {
        if seen.insert(s.clone()) {
            queue.push_back((s, 0));
        }
    }
    while let Some((n, d)) = queue.pop_front() {
        if d == c.max_hops {
            continue;
        }
        for dir in [Direction::Forward, Direction::Backward] {
            for e in g.incident(n.as_str(), dir) {
                if !c.relations.contains(&e.relation) {
                    continue;
                }
                let other = match dir {
                    Direction::Forward => &e.target,
                    Direction::Backward => &e.source,
                };
                if seen.insert(other.clone()) {
                    queue.push_back((other.clone(), d + 1));
                }
            }
        }
    }
    seen
}

/// Maps a selection to highlight sets for every other view in `traces`.
pub fn propagate(
    e: &SelectionEvent,
    traces: &TraceMap,
    g: &ContextGraph,
    c: &CorrelationConfig,
) -> Result<HighlightDirective, SyncError> {
    propagate_indexed(e, traces, &TraceIndex::new(traces), g, c)
}

/// [`propagate`] with a prebuilt index over `traces`.
pub fn propagate_indexed(
    e: &SelectionEvent,
    traces: &TraceMap,
    index: &TraceIndex,
    g: &ContextGraph,
    c: &CorrelationConfig,
) -> Result<HighlightDirective, SyncError> {
    if e.graph_version != g.version() {
        return Err(SyncError::Stale { current: g.version(), got: e.graph_version });
    }
    let unknown = || SyncError::UnknownElement { view: e.view_id.clone(), key: e.element_key.clone() };
    let seeds = traces
        .get(&e.view_id)
        .ok_or_else(|| SyncError::UnknownView(e.view_id.clone()))?
        .get(&e.element_key)
        .ok_or_else(unknown)?;

    let mut highlights: BTreeMap<String, BTreeSet<ElementKey>> =
        traces.keys().filter(|v| **v != e.view_id).map(|v| (v.clone(), BTreeSet::new())).collect();
    for n in correlation_closure(g, seeds.iter().cloned(), c) {
        for (view, key) in index.elements_at(&n) {
            if let Some(set) = highlights.get_mut(view) {
                set.insert(key.clone());
            }
        }
    }
    Ok(HighlightDirective {
        origin_view: e.view_id.clone(),
        origin_key: e.element_key.clone(),
        highlights,
        graph_version: g.version(),
    })
}
