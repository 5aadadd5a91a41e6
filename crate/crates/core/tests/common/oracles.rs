//! Deliberately naive reimplementations used as test oracles. They scan the
//! full edge list instead of using the graph's adjacency indexes.

use std::collections::{BTreeMap, BTreeSet};

use coopsync::context::{ContextGraph, Direction, PathExpression};
use coopsync::transform::{CmpOp, Condition, Expr, RuleSet, TraceMap};
use coopsync::value::{ScalarKind, Value};
use coopsync::views::{ViewConceptModel, ViewContent};

pub type Ids = BTreeSet<String>;

pub fn ids<'a>(it: impl IntoIterator<Item = &'a str>) -> Ids {
    it.into_iter().map(str::to_string).collect()
}

/// One relational-image step by scanning every edge.
pub fn image(g: &ContextGraph, from: &Ids, rel: &str, dir: Direction) -> Ids {
    let mut out = Ids::new();
    for e in g.edges() {
        if e.relation != rel {
            continue;
        }
        let (near, far) = match dir {
            Direction::Forward => (&e.source, &e.target),
            Direction::Backward => (&e.target, &e.source),
        };
        if from.contains(near.as_str()) {
            out.insert(far.as_str().to_string());
        }
    }
    out
}

pub fn walk(g: &ContextGraph, start: &Ids, path: &PathExpression) -> Ids {
    let mut cur = start.clone();
    for s in path.steps() {
        cur = image(g, &cur, &s.relation, s.direction);
    }
    cur
}

/// Bounded undirected closure, one full edge scan per level.
pub fn closure(g: &ContextGraph, seeds: &Ids, relations: &BTreeSet<String>, hops: u32) -> Ids {
    let mut seen = seeds.clone();
    let mut frontier = seeds.clone();
    for _ in 0..hops {
        let mut next = Ids::new();
        for e in g.edges() {
            if !relations.contains(&e.relation) {
                continue;
            }
            let (s, t) = (e.source.as_str(), e.target.as_str());
            if frontier.contains(s) && !seen.contains(t) {
                next.insert(t.to_string());
            }
            if frontier.contains(t) && !seen.contains(s) {
                next.insert(s.to_string());
            }
        }
        seen.extend(next.iter().cloned());
        frontier = next;
    }
    seen
}

/// Expected highlights: every element of every other view whose trace
/// meets the closure of the selected element's trace.
pub fn highlights(
    g: &ContextGraph,
    traces: &TraceMap,
    view: &str,
    key: &str,
    relations: &BTreeSet<String>,
    hops: u32,
) -> BTreeMap<String, BTreeSet<String>> {
    let seed: Ids = traces[view]
        .elements
        .iter()
        .find(|(k, _)| k.to_string() == key)
        .map(|(_, t)| t.iter().map(|n| n.as_str().to_string()).collect())
        .expect("selected element has a trace");
    let c = closure(g, &seed, relations, hops);
    let mut out = BTreeMap::new();
    for (v, t) in traces {
        if v == view {
            continue;
        }
        let hit: BTreeSet<String> = t
            .elements
            .iter()
            .filter(|(_, nodes)| nodes.iter().any(|n| c.contains(n.as_str())))
            .map(|(k, _)| k.to_string())
            .collect();
        out.insert(v.clone(), hit);
    }
    out
}

pub type Elements = BTreeMap<String, BTreeMap<String, Value>>;
pub type Traces = BTreeMap<String, Ids>;

fn attr(g: &ContextGraph, id: &str, name: &str) -> Option<Value> {
    if name == "id" {
        return Some(Value::Str(id.to_string()));
    }
    g.nodes().find(|n| n.id.as_str() == id)?.attrs.get(name).cloned()
}

fn text_of(v: &Value) -> String {
    match v {
        Value::Str(s) | Value::Sym(s) => s.clone(),
        Value::Int(i) => i.to_string(),
        Value::Date(d) => d.to_string(),
    }
}

/// Naive interpreter: every (rule, node) pair, then the role predicate,
/// then dropping elements that link to something no longer there.
/// Element keys are rendered `Concept/key`.
pub fn interpret(
    rs: &RuleSet,
    g: &ContextGraph,
    view: &ViewConceptModel,
    role: &str,
) -> Result<(Elements, Traces), String> {
    let mut elements = Elements::new();
    let mut traces = Traces::new();
    for rule in &rs.rules {
        if rule.target.view != view.view_id {
            continue;
        }
        let concept = view.concept(&rule.target.concept).ok_or("unknown concept")?;
        for node in g.nodes() {
            if node.ty != rule.source_type {
                continue;
            }
            let id = node.id.as_str();
            let mut pass = true;
            for c in &rule.guard {
                pass &= match c {
                    Condition::Role { role: r, .. } => role == "coordinator" || role == r,
                    Condition::Compare { attr: a, op, value, .. } => {
                        let have = text_of(&attr(g, id, a).ok_or("missing attribute")?);
                        let want = text_of(value);
                        match op {
                            CmpOp::Eq => have == want,
                            CmpOp::Ne => have != want,
                            _ => {
                                let have_v = attr(g, id, a).unwrap();
                                let ord = match (&have_v, value) {
                                    (Value::Int(x), Value::Int(y)) => x.cmp(y),
                                    (Value::Date(x), Value::Date(y)) => x.cmp(y),
                                    (Value::Str(x), Value::Str(y)) => x.cmp(y),
                                    _ => return Err("incomparable".into()),
                                };
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
            }
            if !pass {
                continue;
            }
            let mut trace = ids([id]);
            let mut fields = BTreeMap::new();
            for f in &concept.fields {
                let b = rule.bindings.iter().find(|b| b.field == f.name).ok_or("unbound")?;
                let v = match &b.expr {
                    Expr::Literal(v) => v.clone(),
                    Expr::Attr(a) => attr(g, id, a).ok_or("missing attribute")?,
                    Expr::PathAttr { path, attr: a } => {
                        let reached = walk(g, &ids([id]), path);
                        let first = reached.iter().next().ok_or("empty walk")?.clone();
                        trace.insert(first.clone());
                        attr(g, &first, a).ok_or("missing attribute")?
                    }
                };
                let v = match (v, &f.kind) {
                    (Value::Sym(s), ScalarKind::String) => Value::Str(s),
                    (v, _) => v,
                };
                fields.insert(f.name.clone(), v);
            }
            let key = format!("{}/{}", concept.name, text_of(&fields[&concept.key_field]));
            if elements.insert(key.clone(), fields).is_some() {
                return Err(format!("key collision on {key}"));
            }
            traces.insert(key, trace);
        }
    }
    if role != "coordinator" {
        let paths: Vec<_> = rs.visibility.iter().filter(|v| v.view == view.view_id).collect();
        if !paths.is_empty() {
            let actors: Ids = g
                .nodes()
                .filter(|n| n.attrs.get("role").map(text_of).as_deref() == Some(role))
                .map(|n| n.id.as_str().to_string())
                .collect();
            let mut visible = Ids::new();
            for p in paths {
                visible.extend(walk(g, &actors, &p.path));
            }
            traces.retain(|_, t| t.iter().any(|n| visible.contains(n)));
            elements.retain(|k, _| traces.contains_key(k));
            drop_dangling(view, &mut elements, &mut traces);
        }
    }
    Ok((elements, traces))
}

/// Repeatedly removes elements whose link fields point at missing elements.
pub fn drop_dangling(view: &ViewConceptModel, elements: &mut Elements, traces: &mut Traces) {
    loop {
        let before = elements.len();
        let snapshot: BTreeSet<String> = elements.keys().cloned().collect();
        elements.retain(|key, fields| {
            let concept = view.concept(key.split('/').next().unwrap()).unwrap();
            concept.fields.iter().all(|f| match (&f.link, fields.get(&f.name)) {
                (Some(t), Some(v)) => snapshot.contains(&format!("{t}/{}", text_of(v))),
                _ => true,
            })
        });
        traces.retain(|k, _| elements.contains_key(k));
        if elements.len() == before {
            break;
        }
    }
}

/// Keeps the coordinator's elements that a role may see: trace meets the
/// role's visible nodes, and links still resolve afterwards.
pub fn post_filter(
    rs: &RuleSet,
    g: &ContextGraph,
    view: &ViewConceptModel,
    role: &str,
    content: &ViewContent,
    trace: &coopsync::transform::ViewTrace,
) -> BTreeSet<String> {
    let mut elements: Elements =
        content.elements.iter().map(|e| (format!("{}/{}", e.concept, e.key), e.fields.clone())).collect();
    let mut traces: Traces = trace
        .elements
        .iter()
        .map(|(k, t)| (k.to_string(), t.iter().map(|n| n.as_str().to_string()).collect()))
        .collect();
    let paths: Vec<_> = rs.visibility.iter().filter(|v| v.view == view.view_id).collect();
    if paths.is_empty() || role == "coordinator" {
        return elements.into_keys().collect();
    }
    let actors: Ids = g
        .nodes()
        .filter(|n| matches!(n.attrs.get("role"), Some(Value::Sym(r)) if r == role))
        .map(|n| n.id.as_str().to_string())
        .collect();
    let visible: Ids = paths.iter().flat_map(|p| walk(g, &actors, &p.path)).collect();
    traces.retain(|_, t| !t.is_disjoint(&visible));
    elements.retain(|k, _| traces.contains_key(k));
    drop_dangling(view, &mut elements, &mut traces);
    elements.into_keys().collect()
}

/// Field-by-field content check returning `(element, rule)` pairs.
pub fn check_content(view: &ViewConceptModel, content: &ViewContent) -> BTreeSet<(String, &'static str)> {
    let mut out = BTreeSet::new();
    if content.view_id != view.view_id {
        out.insert((content.view_id.clone(), "view-mismatch"));
    }
    let all: Vec<String> = content.elements.iter().map(|e| format!("{}/{}", e.concept, e.key)).collect();
    for (i, e) in content.elements.iter().enumerate() {
        let subject = all[i].clone();
        if all[..i].contains(&subject) {
            out.insert((subject.clone(), "duplicate-key"));
        }
        let Some(c) = view.concepts.iter().find(|c| c.name == e.concept) else {
            out.insert((subject, "unknown-concept"));
            continue;
        };
        for f in &c.fields {
            let Some(v) = e.fields.get(&f.name) else {
                out.insert((subject.clone(), "missing-field"));
                continue;
            };
            let ok = match (&f.kind, v) {
                (ScalarKind::String, Value::Str(_)) => true,
                (ScalarKind::Integer, Value::Int(_)) => true,
                (ScalarKind::Date, Value::Date(_)) => true,
                (ScalarKind::Enum(vals), Value::Sym(s)) => vals.contains(s),
                _ => false,
            };
            if !ok {
                out.insert((subject.clone(), "field-kind"));
            } else if let (Some(t), Value::Str(k)) = (&f.link, v) {
                if !all.contains(&format!("{t}/{k}")) {
                    out.insert((subject.clone(), "dangling-link"));
                }
            }
        }
        for name in e.fields.keys() {
            if !c.fields.iter().any(|f| &f.name == name) {
                out.insert((subject.clone(), "unknown-field"));
            }
        }
        if let Some(Value::Str(k)) = e.fields.get(&c.key_field) {
            if k != &e.key {
                out.insert((subject.clone(), "key-mismatch"));
            }
        }
    }
    out
}
