use std::borrow::Borrow;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::value::Value;

macro_rules! string_id {
    ($(#[$doc:meta])* $name:ident) => {
        $(#[$doc])*
        #[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(String);

        impl $name {
            pub fn new(s: impl Into<String>) -> Self {
                $name(s.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl Borrow<str> for $name {
            fn borrow(&self) -> &str {
                &self.0
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                $name(s.to_string())
            }
        }

        impl From<String> for $name {
            fn from(s: String) -> Self {
                $name(s)
            }
        }
    };
}

string_id!(
    /// Caller-supplied stable node id, e.g. `ouvrage:M1`.
    NodeId
);
string_id!(
    /// Edge id, derived from `(source, relation, target)`.
    EdgeId
);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub id: NodeId,
    pub ty: String,
    pub attrs: BTreeMap<String, Value>,
}

impl Node {
    pub fn new(id: impl Into<NodeId>, ty: impl Into<String>) -> Self {
        Node { id: id.into(), ty: ty.into(), attrs: BTreeMap::new() }
    }

    pub fn with(mut self, attr: &str, value: Value) -> Self {
        self.attrs.insert(attr.to_string(), value);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub id: EdgeId,
    pub relation: String,
    pub source: NodeId,
    pub target: NodeId,
}

impl Edge {
    pub fn new(relation: impl Into<String>, source: impl Into<NodeId>, target: impl Into<NodeId>) -> Self {
        let (relation, source, target) = (relation.into(), source.into(), target.into());
        Edge { id: Edge::id_for(&relation, &source, &target), relation, source, target }
    }

    pub fn id_for(relation: &str, source: &NodeId, target: &NodeId) -> EdgeId {
        EdgeId(format!("{source}-{relation}->{target}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    pub fn suffix(self) -> &'static str {
        match self {
            Direction::Forward => "fwd",
            Direction::Backward => "bwd",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("duplicate node id `{0}`")]
    DuplicateNode(NodeId),
    #[error("duplicate edge `{0}`")]
    DuplicateEdge(EdgeId),
    #[error("edge `{edge}` references missing node `{missing}`")]
    DanglingEdge { edge: EdgeId, missing: NodeId },
    #[error("unknown node `{0}`")]
    UnknownNode(NodeId),
    #[error("unknown edge `{0}`")]
    UnknownEdge(EdgeId),
}

/// An immutable, versioned snapshot of the cooperation context.
#[derive(Debug, Clone)]
pub struct ContextGraph {
    version: u64,
    nodes: BTreeMap<NodeId, Node>,
    /// Sorted by edge id.
    edges: Vec<Edge>,
    outgoing: HashMap<NodeId, Vec<usize>>,
    incoming: HashMap<NodeId, Vec<usize>>,
}

impl PartialEq for ContextGraph {
    fn eq(&self, other: &Self) -> bool {
        self.version == other.version && self.nodes == other.nodes && self.edges == other.edges
    }
}

impl ContextGraph {
    pub fn empty(version: u64) -> Self {
        ContextGraph {
            version,
            nodes: BTreeMap::new(),
            edges: Vec::new(),
            outgoing: HashMap::new(),
            incoming: HashMap::new(),
        }
    }

    /// Builds a snapshot, reporting every duplicate id and dangling endpoint.
    pub fn build(
        version: u64,
        nodes: impl IntoIterator<Item = Node>,
        edges: impl IntoIterator<Item = Edge>,
    ) -> Result<Self, Vec<GraphError>> {
        let mut errors = Vec::new();
        let mut node_map = BTreeMap::new();
        for n in nodes {
            if node_map.contains_key(&n.id) {
                errors.push(GraphError::DuplicateNode(n.id.clone()));
            } else {
                node_map.insert(n.id.clone(), n);
            }
        }
        let mut edge_map: BTreeMap<EdgeId, Edge> = BTreeMap::new();
        for e in edges {
            for end in [&e.source, &e.target] {
                if !node_map.contains_key(end) {
                    errors.push(GraphError::DanglingEdge { edge: e.id.clone(), missing: end.clone() });
                }
            }
            if edge_map.contains_key(&e.id) {
                errors.push(GraphError::DuplicateEdge(e.id.clone()));
            } else {
                edge_map.insert(e.id.clone(), e);
            }
        }
        if !errors.is_empty() {
            return Err(errors);
        }
        let edges: Vec<Edge> = edge_map.into_values().collect();
        let mut outgoing: HashMap<NodeId, Vec<usize>> = HashMap::new();
        let mut incoming: HashMap<NodeId, Vec<usize>> = HashMap::new();
        for (i, e) in edges.iter().enumerate() {
            outgoing.entry(e.source.clone()).or_default().push(i);
            incoming.entry(e.target.clone()).or_default().push(i);
        }
        Ok(ContextGraph { version, nodes: node_map, edges, outgoing, incoming })
    }

    pub fn version(&self) -> u64 {
        self.version
    }

    pub fn node(&self, id: &str) -> Option<&Node> {
        self.nodes.get(id)
    }

    pub fn contains(&self, id: &str) -> bool {
        self.nodes.contains_key(id)
    }

    /// Nodes in id order.
    pub fn nodes(&self) -> impl Iterator<Item = &Node> {
        self.nodes.values()
    }

    pub fn nodes_of_type<'a>(&'a self, ty: &'a str) -> impl Iterator<Item = &'a Node> + 'a {
        self.nodes.values().filter(move |n| n.ty == ty)
    }

    /// Edges in id order.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: &str) -> Option<&Edge> {
        self.edges.binary_search_by(|e| e.id.as_str().cmp(id)).ok().map(|i| &self.edges[i])
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges leaving (`Forward`) or entering (`Backward`) `node`.
    pub fn incident(&self, node: &str, dir: Direction) -> impl Iterator<Item = &Edge> {
        let idx = match dir {
            Direction::Forward => self.outgoing.get(node),
            Direction::Backward => self.incoming.get(node),
        };
        idx.into_iter().flatten().map(|&i| &self.edges[i])
    }

    pub(crate) fn into_parts(self) -> (Vec<Node>, Vec<Edge>) {
        (self.nodes.into_values().collect(), self.edges)
    }
}

/// Nodes reachable from `n` over exactly one `rel` edge in direction `dir`.
pub fn neighbors(g: &ContextGraph, n: &str, rel: &str, dir: Direction) -> Result<BTreeSet<NodeId>, GraphError> {
    if !g.contains(n) {
        return Err(GraphError::UnknownNode(NodeId::from(n)));
    }
    Ok(g.incident(n, dir)
        .filter(|e| e.relation == rel)
        .map(|e| match dir {
            Direction::Forward => e.target.clone(),
            Direction::Backward => e.source.clone(),
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PathStep {
    pub relation: String,
    pub direction: Direction,
}

impl PathStep {
    pub fn new(relation: impl Into<String>, direction: Direction) -> Self {
        PathStep { relation: relation.into(), direction }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PathError {
    #[error("path expression must have at least one step")]
    Empty,
    #[error("unknown relation `{relation}` in path step {step}")]
    UnknownRelation { step: usize, relation: String },
}

/// A non-empty composition of relation traversals.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PathExpression {
    steps: Vec<PathStep>,
}

impl PathExpression {
    pub fn new(steps: Vec<PathStep>) -> Result<Self, PathError> {
        if steps.is_empty() {
            return Err(PathError::Empty);
        }
        Ok(PathExpression { steps })
    }

    pub fn steps(&self) -> &[PathStep] {
        &self.steps
    }

    /// Every step must name a relation of the domain model.
    pub fn check(&self, dm: &crate::metamodel::DomainModel) -> Result<(), PathError> {
        for (i, s) in self.steps.iter().enumerate() {
            if dm.relation(&s.relation).is_none() {
                return Err(PathError::UnknownRelation { step: i + 1, relation: s.relation.clone() });
            }
        }
        Ok(())
    }
}

impl fmt::Display for PathExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.steps.iter().enumerate() {
            if i > 0 {
                f.write_str(" / ")?;
            }
            write!(f, "{}.{}", s.relation, s.direction.suffix())?;
        }
        Ok(())
    }
}

/// Image of `start` under the composed steps of `path`.
pub fn walk<'a, I>(g: &ContextGraph, start: I, path: &PathExpression) -> Result<BTreeSet<NodeId>, GraphError>
where
    I: IntoIterator<Item = &'a NodeId>,
{
    let mut frontier: BTreeSet<NodeId> = BTreeSet::new();
    for n in start {
        if !g.contains(n.as_str()) {
            return Err(GraphError::UnknownNode(n.clone()));
        }
        frontier.insert(n.clone());
    }
    for step in &path.steps {
        let mut next = BTreeSet::new();
        for n in &frontier {
            for e in g.incident(n.as_str(), step.direction) {
                if e.relation == step.relation {
                    next.insert(match step.direction {
                        Direction::Forward => e.target.clone(),
                        Direction::Backward => e.source.clone(),
                    });
                }
            }
        }
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }
    Ok(frontier)
}
