use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::ast::{CmpOp, Condition, Expr, Rule, RuleSet};
use super::check::ROLE_ATTRIBUTE;
use crate::context::{walk, ContextGraph, Node, NodeId};
use crate::metamodel::ID_ATTRIBUTE;
use crate::value::Value;
use crate::views::{Element, ElementKey, ViewConceptModel, ViewContent};

pub const COORDINATOR_ROLE: &str = "coordinator";

/// Restricts generated content to what one trade role may see. The
/// coordinator sees everything.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RoleFilter {
    role: String,
}

impl RoleFilter {
    pub fn new(role: impl Into<String>) -> Self {
        RoleFilter { role: role.into() }
    }

    pub fn coordinator() -> Self {
        RoleFilter::new(COORDINATOR_ROLE)
    }

    pub fn role(&self) -> &str {
        &self.role
    }

    pub fn is_coordinator(&self) -> bool {
        self.role == COORDINATOR_ROLE
    }

    /// `role = r` guards hold for the matching role and for the coordinator.
    pub fn satisfies(&self, role: &str) -> bool {
        self.is_coordinator() || self.role == role
    }
}

impl Default for RoleFilter {
    fn default() -> Self {
        RoleFilter::coordinator()
    }
}

/// Trace links of one generated view: element key to the context nodes it
/// was derived from, all taken from graph `graph_version`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct ViewTrace {
    pub view_id: String,
    pub graph_version: u64,
    pub elements: BTreeMap<ElementKey, BTreeSet<NodeId>>,
}

impl ViewTrace {
    pub fn get(&self, key: &ElementKey) -> Option<&BTreeSet<NodeId>> {
        self.elements.get(key)
    }
}

/// Trace links of every view, by view id.
pub type TraceMap = BTreeMap<String, ViewTrace>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GenerateError {
    #[error("rule `{rule}` on node `{node}`: {message}")]
    Eval { rule: String, node: NodeId, message: String },
    #[error("{key} is produced twice, from `{first}` and from `{second}`")]
    KeyCollision { key: ElementKey, first: NodeId, second: NodeId },
    #[error("{key}: field `{field}` references missing {target}")]
    DanglingLink { key: ElementKey, field: String, target: ElementKey },
}

struct Produced {
    element: Element,
    source: NodeId,
    trace: BTreeSet<NodeId>,
}

/// Runs every rule targeting `view` over `g`, then applies the role filter.
///
/// Each matching source node yields one element whose trace is the source
/// node plus every node selected by a `first(walk(..))` binding. Content and
/// trace share the same key set. For a trade role, elements whose trace
/// misses the role's visible nodes are dropped, and so are elements left
/// with a link to a dropped element.
pub fn generate(
    rs: &RuleSet,
    g: &ContextGraph,
    view: &ViewConceptModel,
    filter: &RoleFilter,
) -> Result<(ViewContent, ViewTrace), GenerateError> {
    let mut produced: BTreeMap<ElementKey, Produced> = BTreeMap::new();
    for rule in rs.rules_for_view(&view.view_id) {
        let Some(concept) = view.concept(&rule.target.concept) else {
            return Err(GenerateError::Eval {
                rule: rule.name.clone(),
                node: NodeId::new(""),
                message: format!("view `{}` has no concept `{}`", view.view_id, rule.target.concept),
            });
        };
        for node in g.nodes_of_type(&rule.source_type) {
            let err = |message: String| GenerateError::Eval { rule: rule.name.clone(), node: node.id.clone(), message };
            if !guard_holds(rule, node, filter).map_err(err)? {
                continue;
            }
            let mut trace = BTreeSet::from([node.id.clone()]);
            let mut fields = BTreeMap::new();
            for f in &concept.fields {
                let b = rule.binding(&f.name).ok_or_else(|| err(format!("field `{}` is not bound", f.name)))?;
                let v = eval(g, node, &b.expr, &mut trace).map_err(err)?.coerce_to(&f.kind);
                if !f.kind.accepts(&v) {
                    return Err(err(format!(
                        "field `{}` expects {}, got {} `{}`",
                        f.name,
                        f.kind,
                        v.kind_name(),
                        v.as_text()
                    )));
                }
                fields.insert(f.name.clone(), v);
            }
            let key = match fields.get(&concept.key_field) {
                Some(Value::Str(k)) => k.clone(),
                _ => return Err(err(format!("key field `{}` is not a string", concept.key_field))),
            };
            let ek = ElementKey::new(concept.name.clone(), key.clone());
            if let Some(prev) = produced.get(&ek) {
                return Err(GenerateError::KeyCollision {
                    key: ek,
                    first: prev.source.clone(),
                    second: node.id.clone(),
                });
            }
            produced.insert(
                ek,
                Produced {
                    element: Element { concept: concept.name.clone(), key, fields },
                    source: node.id.clone(),
                    trace,
                },
            );
        }
    }

    let links = view.intra_view_links();
    let dangling = |produced: &BTreeMap<ElementKey, Produced>, p: &Produced| {
        links.iter().filter(|(c, _, _)| *c == p.element.concept).find_map(|(_, field, target)| {
            match p.element.fields.get(*field) {
                Some(Value::Str(k)) => {
                    let tk = ElementKey::new(*target, k.clone());
                    (!produced.contains_key(&tk)).then(|| (field.to_string(), tk))
                }
                _ => None,
            }
        })
    };
    for (key, p) in &produced {
        if let Some((field, target)) = dangling(&produced, p) {
            return Err(GenerateError::DanglingLink { key: key.clone(), field, target });
        }
    }

    if !filter.is_coordinator() {
        if let Some(visible) = visible_nodes(rs, g, &view.view_id, filter) {
            produced.retain(|_, p| !p.trace.is_disjoint(&visible));
            loop {
                let drop: Vec<ElementKey> =
                    produced.iter().filter(|(_, p)| dangling(&produced, p).is_some()).map(|(k, _)| k.clone()).collect();
                if drop.is_empty() {
                    break;
                }
                for k in drop {
                    produced.remove(&k);
                }
            }
        }
    }

    let mut content = ViewContent::empty(view.view_id.clone(), g.version());
    let mut trace = ViewTrace { view_id: view.view_id.clone(), graph_version: g.version(), elements: BTreeMap::new() };
    for (k, p) in produced {
        content.elements.push(p.element);
        trace.elements.insert(k, p.trace);
    }
    content.sort();
    Ok((content, trace))
}

/// Nodes a trade role may see in `view`, or `None` when the view declares no
/// visibility path and is therefore unfiltered.
pub fn visible_nodes(rs: &RuleSet, g: &ContextGraph, view: &str, filter: &RoleFilter) -> Option<BTreeSet<NodeId>> {
    let decls: Vec<_> = rs.visibility_for(view).collect();
    if decls.is_empty() {
        return None;
    }
    let actors = role_holders(g, filter.role());
    let mut out = BTreeSet::new();
    for d in decls {
        out.extend(walk(g, &actors, &d.path).expect("actors come from the graph"));
    }
    Some(out)
}

/// Nodes whose `role` attribute equals `role`.
pub fn role_holders(g: &ContextGraph, role: &str) -> BTreeSet<NodeId> {
    g.nodes()
        .filter(|n| {
            n.attrs.get(ROLE_ATTRIBUTE).is_some_and(|v| matches!(v, Value::Sym(s) | Value::Str(s) if s == role))
        })
        .map(|n| n.id.clone())
        .collect()
}

fn attr_of(node: &Node, attr: &str) -> Result<Value, String> {
    if attr == ID_ATTRIBUTE {
        return Ok(Value::Str(node.id.as_str().to_string()));
    }
    node.attrs.get(attr).cloned().ok_or_else(|| format!("node `{}` has no attribute `{attr}`", node.id))
}

fn guard_holds(rule: &Rule, node: &Node, filter: &RoleFilter) -> Result<bool, String> {
    for c in &rule.guard {
        let ok = match c {
            Condition::Role { role, .. } => filter.satisfies(role),
            Condition::Compare { attr, op, value, .. } => {
                let actual = attr_of(node, attr)?;
                let lit = value.clone();
                match op {
                    CmpOp::Eq => same_value(&actual, &lit),
                    CmpOp::Ne => !same_value(&actual, &lit),
                    _ => {
                        let ord = actual.compare(&lit).ok_or_else(|| {
                            format!("cannot order {} `{}` against {}", actual.kind_name(), actual.as_text(), lit)
                        })?;
                        match op {
                            CmpOp::Lt => ord.is_lt(),
                            CmpOp::Le => ord.is_le(),
                            CmpOp::Gt => ord.is_gt(),
                            _ => ord.is_ge(),
                        }
                    }
                }
            }
        };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Equality that lets a bare word match a string attribute.
fn same_value(actual: &Value, lit: &Value) -> bool {
    match (actual, lit) {
        (Value::Str(a), Value::Sym(b)) | (Value::Sym(a), Value::Str(b)) => a == b,
        _ => actual == lit,
    }
}

fn eval(g: &ContextGraph, node: &Node, e: &Expr, trace: &mut BTreeSet<NodeId>) -> Result<Value, String> {
    match e {
        Expr::Literal(v) => Ok(v.clone()),
        Expr::Attr(a) => attr_of(node, a),
        Expr::PathAttr { path, attr } => {
            let reached = walk(g, [&node.id], path).map_err(|e| e.to_string())?;
            let first = reached.first().ok_or_else(|| format!("walk({path}) from `{}` reaches no node", node.id))?;
            trace.insert(first.clone());
            attr_of(g.node(first.as_str()).expect("walk stays in the graph"), attr)
        }
    }
}
