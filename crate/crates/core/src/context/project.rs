//! `.cpj` project files and publish deltas.
//!
//! ```text
//! node ouvrage:M1 : Ouvrage { name="Mur M1" geom="box:0,0,0,6,0.2,3" }
//! edge concerne tache:T01 -> ouvrage:M1
//! ```
//!
//! Deltas use the same statements prefixed by `add`, plus `remove node <id>`
//! and `remove edge <relation> <src> -> <tgt>`.

use std::collections::BTreeMap;

use thiserror::Error;

use super::graph::{ContextGraph, Edge, GraphError, Node, NodeId};
use crate::metamodel::{validate_graph, DomainModel};
use crate::syntax::{Cursor, Diagnostic, LexOptions, ParseError, Position, Tok};
use crate::value::Value;

const LEX: LexOptions = LexOptions { colon_in_words: true };

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ProjectFile {
    pub nodes: Vec<(Position, Node)>,
    pub edges: Vec<(Position, Edge)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DeltaOp {
    AddNode(Node),
    RemoveNode(NodeId),
    AddEdge(Edge),
    /// Removes the edge with the same relation and endpoints.
    RemoveEdge(Edge),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IngestError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("project rejected with {} problem(s)", .0.len())]
    Rejected(Vec<Diagnostic>),
}

impl IngestError {
    pub fn diagnostics(&self) -> Vec<Diagnostic> {
        match self {
            IngestError::Parse(e) => vec![e.clone().into()],
            IngestError::Rejected(d) => d.clone(),
        }
    }
}

fn node_id(cur: &mut Cursor) -> Result<NodeId, ParseError> {
    let pos = cur.pos();
    match &cur.peek().tok {
        Tok::Word(w) => {
            let id = NodeId::new(w.clone());
            cur.bump();
            Ok(id)
        }
        Tok::Str(s) if !s.is_empty() => {
            let id = NodeId::new(s.clone());
            cur.bump();
            Ok(id)
        }
        _ => Err(ParseError::at(pos, format!("expected a node id, found {}", cur.peek().tok))),
    }
}

/// After `node`: `<id> : <Type> [{ attr=value ... }]`.
fn node_body(cur: &mut Cursor) -> Result<Node, ParseError> {
    let id = node_id(cur)?;
    cur.expect_punct(":")?;
    let (ty, _) = cur.expect_ident("a type name")?;
    let mut attrs = BTreeMap::new();
    if cur.eat_punct("{") {
        while !cur.eat_punct("}") {
            let (name, pos) = cur.expect_ident("an attribute name or `}`")?;
            cur.expect_punct("=")?;
            let value = Value::parse(cur)?;
            if attrs.insert(name.clone(), value).is_some() {
                return Err(ParseError::at(pos, format!("attribute `{name}` set twice")));
            }
            cur.eat_punct(",");
        }
    }
    Ok(Node { id, ty, attrs })
}

/// After `edge`: `<relation> <src> -> <tgt>`.
fn edge_body(cur: &mut Cursor) -> Result<Edge, ParseError> {
    let (relation, _) = cur.expect_ident("a relation name")?;
    let source = node_id(cur)?;
    cur.expect_punct("->")?;
    let target = node_id(cur)?;
    Ok(Edge::new(relation, source, target))
}

pub fn parse_project(text: &str) -> Result<ProjectFile, ParseError> {
    let mut cur = Cursor::new(text, LEX)?;
    let mut file = ProjectFile::default();
    while !cur.at_eof() {
        let pos = cur.pos();
        if cur.eat_keyword("node") {
            file.nodes.push((pos, node_body(&mut cur)?));
        } else if cur.eat_keyword("edge") {
            file.edges.push((pos, edge_body(&mut cur)?));
        } else {
            return Err(cur.unexpected("`node` or `edge`"));
        }
    }
    Ok(file)
}

pub fn parse_delta(text: &str) -> Result<Vec<DeltaOp>, ParseError> {
    let mut cur = Cursor::new(text, LEX)?;
    let mut ops = Vec::new();
    while !cur.at_eof() {
        let add = if cur.eat_keyword("add") {
            true
        } else if cur.eat_keyword("remove") {
            false
        } else {
            return Err(cur.unexpected("`add` or `remove`"));
        };
        let op = if cur.eat_keyword("node") {
            if add {
                DeltaOp::AddNode(node_body(&mut cur)?)
            } else {
                DeltaOp::RemoveNode(node_id(&mut cur)?)
            }
        } else if cur.eat_keyword("edge") {
            let e = edge_body(&mut cur)?;
            if add {
                DeltaOp::AddEdge(e)
            } else {
                DeltaOp::RemoveEdge(e)
            }
        } else {
            return Err(cur.unexpected("`node` or `edge`"));
        };
        ops.push(op);
    }
    Ok(ops)
}

pub fn print_delta(ops: &[DeltaOp]) -> String {
    let mut out = String::new();
    for op in ops {
        match op {
            DeltaOp::AddNode(n) => {
                out.push_str("add ");
                out.push_str(&print_node(n));
            }
            DeltaOp::RemoveNode(id) => out.push_str(&format!("remove node {id}")),
            DeltaOp::AddEdge(e) => out.push_str(&format!("add edge {} {} -> {}", e.relation, e.source, e.target)),
            DeltaOp::RemoveEdge(e) => out.push_str(&format!("remove edge {} {} -> {}", e.relation, e.source, e.target)),
        }
        out.push('\n');
    }
    out
}

fn print_node(n: &Node) -> String {
    let attrs: Vec<String> = n.attrs.iter().map(|(k, v)| format!("{k}={v}")).collect();
    format!("node {} : {} {{ {} }}", n.id, n.ty, attrs.join(" "))
}

/// Canonical `.cpj` text for a graph (nodes then edges, both in id order).
pub fn print_project(g: &ContextGraph) -> String {
    let mut out = String::new();
    for n in g.nodes() {
        out.push_str(&print_node(n));
        out.push('\n');
    }
    for e in g.edges() {
        out.push_str(&format!("edge {} {} -> {}\n", e.relation, e.source, e.target));
    }
    out
}

/// Parses, builds and validates a project; the result is version 1.
pub fn load_project(dm: &DomainModel, text: &str) -> Result<ContextGraph, IngestError> {
    let file = parse_project(text)?;
    let node_pos = |id: &str| file.nodes.iter().rev().find(|(_, n)| n.id.as_str() == id).map(|(p, _)| *p);
    let edge_pos = |id: &str| file.edges.iter().rev().find(|(_, e)| e.id.as_str() == id).map(|(p, _)| *p);

    let g =
        ContextGraph::build(1, file.nodes.iter().map(|(_, n)| n.clone()), file.edges.iter().map(|(_, e)| e.clone()))
            .map_err(|errs| {
                let mut diags: Vec<Diagnostic> = errs
                    .into_iter()
                    .map(|e| {
                        let pos = match &e {
                            GraphError::DuplicateNode(id) | GraphError::UnknownNode(id) => node_pos(id.as_str()),
                            GraphError::DuplicateEdge(id)
                            | GraphError::UnknownEdge(id)
                            | GraphError::DanglingEdge { edge: id, .. } => edge_pos(id.as_str()),
                        };
                        Diagnostic::new(pos.unwrap_or_default(), e.to_string())
                    })
                    .collect();
                diags.sort();
                IngestError::Rejected(diags)
            })?;

    let report = validate_graph(dm, &g);
    if !report.is_empty() {
        let mut diags: Vec<Diagnostic> = report
            .violations()
            .iter()
            .map(|v| {
                let pos = node_pos(&v.subject).or_else(|| edge_pos(&v.subject));
                Diagnostic::new(pos.unwrap_or_default(), format!("{}: {}", v.subject, v.message))
            })
            .collect();
        diags.sort();
        return Err(IngestError::Rejected(diags));
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metamodel::parse_domain_model;

    fn dm() -> DomainModel {
        parse_domain_model(
            "type Ouvrage : Artifact.Object { name: string }\n\
             type T : Activity { start: date n: integer s: enum(a, b) }\n\
             relation concerne : T -> Ouvrage via concerns",
        )
        .unwrap()
    }

    #[test]
    fn empty_project_is_version_one() {
        let g = load_project(&dm(), "# nothing\n").unwrap();
        assert_eq!(g.version(), 1);
        assert_eq!(g.node_count(), 0);
    }

    #[test]
    fn parses_typed_values() {
        let g = load_project(
            &dm(),
            "node ouvrage:M1 : Ouvrage { name=\"Mur M1\" }\n\
             node t:1 : T { start=2007-03-05 n=3 s=a }\n\
             edge concerne t:1 -> ouvrage:M1",
        )
        .unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.node("t:1").unwrap().attrs["n"], Value::Int(3));
        assert_eq!(g.edges()[0].id.as_str(), "t:1-concerne->ouvrage:M1");
    }

    #[test]
    fn dangling_edge_is_listed() {
        let err = load_project(&dm(), "node ouvrage:M1 : Ouvrage { name=\"x\" }\nedge concerne t:9 -> ouvrage:M1\n")
            .unwrap_err();
        let IngestError::Rejected(d) = err else { panic!("{err:?}") };
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].pos, Position::new(2, 1));
        assert!(d[0].message.contains("t:9"), "{}", d[0]);
    }

    #[test]
    fn validation_violations_reject_load() {
        let err = load_project(&dm(), "node x : Ouvrage {}").unwrap_err();
        assert!(matches!(err, IngestError::Rejected(ref d) if d[0].message.contains("missing attribute")));
    }

    #[test]
    fn bad_date_is_a_parse_error() {
        let err = load_project(&dm(), "node t : T { start=2007-13-01 n=1 s=a }").unwrap_err();
        let IngestError::Parse(p) = err else { panic!() };
        assert_eq!((p.line, p.column), (1, 20));
    }

    #[test]
    fn delta_round_trip() {
        let text = "add node rem:R10 : Remarque { number=10 text=\"fissure\" }\n\
                    add edge porte_sur rem:R10 -> ouvrage:M1\n\
                    remove edge concerne tache:T01 -> ouvrage:M1\n\
                    remove node ouvrage:M2\n";
        let ops = parse_delta(text).unwrap();
        assert_eq!(ops.len(), 4);
        assert_eq!(parse_delta(&print_delta(&ops)).unwrap(), ops);
    }

    #[test]
    fn print_project_reloads_identically() {
        let src = "node ouvrage:M1 : Ouvrage { name=\"Mur \\\"M1\\\"\" }\n\
                   node t:1 : T { start=2007-03-05 n=3 s=a }\n\
                   edge concerne t:1 -> ouvrage:M1";
        let g = load_project(&dm(), src).unwrap();
        assert_eq!(load_project(&dm(), &print_project(&g)).unwrap(), g);
    }
}
