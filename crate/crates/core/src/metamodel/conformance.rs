use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use super::{Cardinality, DomainModel};
use crate::context::ContextGraph;

/// One conformance problem, attached to the id of the offending element.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Violation {
    pub subject: String,
    pub rule: &'static str,
    pub message: String,
}

impl Violation {
    pub fn new(subject: impl Into<String>, rule: &'static str, message: impl Into<String>) -> Self {
        Violation { subject: subject.into(), rule, message: message.into() }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} [{}]", self.subject, self.message, self.rule)
    }
}

/// Violations sorted by `(subject, rule, message)`. Empty means conforming.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct ValidationReport {
    violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn from_violations(mut violations: Vec<Violation>) -> Self {
        violations.sort();
        violations.dedup();
        ValidationReport { violations }
    }

    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn len(&self) -> usize {
        self.violations.len()
    }

    pub fn violations(&self) -> &[Violation] {
        &self.violations
    }

    pub fn into_violations(self) -> Vec<Violation> {
        self.violations
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Checks a context graph against a domain model.
pub fn validate_graph(dm: &DomainModel, g: &ContextGraph) -> ValidationReport {
    let mut out = Vec::new();
    for node in g.nodes() {
        let Some(ty) = dm.domain_type(&node.ty) else {
            out.push(Violation::new(node.id.as_str(), "unknown-type", format!("unknown type `{}`", node.ty)));
            continue;
        };
        for decl in &ty.attributes {
            match node.attrs.get(&decl.name) {
                None => out.push(Violation::new(
                    node.id.as_str(),
                    "missing-attribute",
                    format!("missing attribute `{}` of type `{}`", decl.name, ty.name),
                )),
                Some(v) if !decl.kind.accepts(v) => out.push(Violation::new(
                    node.id.as_str(),
                    "attribute-kind",
                    format!(
                        "attribute `{}` expects {}, found {} `{}`",
                        decl.name,
                        decl.kind,
                        v.kind_name(),
                        v.as_text()
                    ),
                )),
                Some(_) => {}
            }
        }
        for name in node.attrs.keys() {
            if ty.attribute(name).is_none() {
                out.push(Violation::new(
                    node.id.as_str(),
                    "unknown-attribute",
                    format!("type `{}` declares no attribute `{name}`", ty.name),
                ));
            }
        }
    }

    let mut per_source: BTreeMap<(&str, &str), usize> = BTreeMap::new();
    for edge in g.edges() {
        let Some(rel) = dm.relation(&edge.relation) else {
            out.push(Violation::new(
                edge.id.as_str(),
                "unknown-relation",
                format!("unknown relation `{}`", edge.relation),
            ));
            continue;
        };
        let src_ty = g.node(edge.source.as_str()).map(|n| n.ty.as_str());
        let tgt_ty = g.node(edge.target.as_str()).map(|n| n.ty.as_str());
        if src_ty != Some(rel.source_type.as_str()) || tgt_ty != Some(rel.target_type.as_str()) {
            out.push(Violation::new(
                edge.id.as_str(),
                "endpoint-type",
                format!(
                    "relation `{}` expects {} -> {}, found {} -> {}",
                    rel.name,
                    rel.source_type,
                    rel.target_type,
                    src_ty.unwrap_or("?"),
                    tgt_ty.unwrap_or("?")
                ),
            ));
        }
        if rel.cardinality == Cardinality::One {
            *per_source.entry((edge.source.as_str(), rel.name.as_str())).or_default() += 1;
        }
    }
    for ((source, rel), count) in per_source {
        if count > 1 {
            out.push(Violation::new(
                source,
                "cardinality",
                format!("relation `{rel}` allows one target, found {count}"),
            ));
        }
    }
    ValidationReport::from_violations(out)
}
