use std::collections::BTreeSet;
use std::fmt;

use super::ast::{Condition, Expr, Rule, RuleSet};
use crate::context::{Direction, PathExpression};
use crate::metamodel::DomainModel;
use crate::syntax::Position;
use crate::value::{ScalarKind, Value};
use crate::views::ViewConceptModel;

/// Actor attribute that carries the trade role.
pub const ROLE_ATTRIBUTE: &str = "role";

/// A static problem in a rule file, positioned at the construct at fault.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct RuleIssue {
    pub pos: Position,
    pub code: &'static str,
    pub message: String,
}

impl fmt::Display for RuleIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} [{}]", self.pos, self.message, self.code)
    }
}

/// Checks a parsed rule set against the domain model and the view concept
/// models. Returns issues sorted by position; empty means the rules are
/// well formed.
pub fn check_rules(rs: &RuleSet, dm: &DomainModel, views: &[ViewConceptModel]) -> Vec<RuleIssue> {
    let mut out = Vec::new();
    for r in &rs.rules {
        check_rule(r, dm, views, &mut out);
    }

    // Link fields whose target concept no rule produces can never resolve.
    for v in views {
        let produced: BTreeSet<&str> = rs.rules_for_view(&v.view_id).map(|r| r.target.concept.as_str()).collect();
        for r in rs.rules_for_view(&v.view_id) {
            let Some(c) = v.concept(&r.target.concept) else { continue };
            for f in &c.fields {
                if let Some(t) = &f.link {
                    if !produced.contains(t.as_str()) {
                        let pos = r.binding(&f.name).map(|b| b.loc.0).unwrap_or(r.loc.0);
                        out.push(RuleIssue {
                            pos,
                            code: "unproduced-link-target",
                            message: format!("field `{}` links to {}.{}, which no rule produces", f.name, v.view_id, t),
                        });
                    }
                }
            }
        }
    }

    let role_types: BTreeSet<&str> =
        dm.types.iter().filter(|t| t.attribute(ROLE_ATTRIBUTE).is_some()).map(|t| t.name.as_str()).collect();
    for vis in &rs.visibility {
        let pos = vis.loc.0;
        if !views.iter().any(|v| v.view_id == vis.view) {
            out.push(RuleIssue { pos, code: "unknown-view", message: format!("unknown view `{}`", vis.view) });
        }
        if role_types.is_empty() {
            out.push(RuleIssue {
                pos,
                code: "no-role-attribute",
                message: format!("no domain type declares a `{ROLE_ATTRIBUTE}` attribute"),
            });
            continue;
        }
        if let Err(msg) = type_path(dm, role_types.iter().copied().collect(), &vis.path) {
            out.push(RuleIssue { pos, code: "path-type", message: msg });
        }
    }
    out.sort();
    out
}

fn check_rule(r: &Rule, dm: &DomainModel, views: &[ViewConceptModel], out: &mut Vec<RuleIssue>) {
    let mut push = |pos: Position, code: &'static str, message: String| {
        out.push(RuleIssue { pos, code, message: format!("rule `{}`: {message}", r.name) })
    };

    let src = dm.domain_type(&r.source_type);
    if src.is_none() {
        push(r.loc.0, "unknown-source-type", format!("unknown domain type `{}`", r.source_type));
    }

    for c in &r.guard {
        let Condition::Compare { attr, op, value, loc } = c else { continue };
        let Some(src) = src else { continue };
        match src.attribute_kind(attr) {
            None => push(loc.0, "unknown-attribute", format!("type `{}` has no attribute `{attr}`", src.name)),
            Some(kind) => {
                let coerced = value.clone().coerce_to(&kind);
                if !kind.accepts(&coerced) {
                    push(
                        loc.0,
                        "guard-kind",
                        format!("`{attr}` is {kind}, compared with {} `{}`", value.kind_name(), value.as_text()),
                    );
                } else if op.is_ordering() && kind.is_enum() {
                    push(loc.0, "guard-operator", format!("`{}` does not apply to enumeration `{attr}`", op.symbol()));
                }
            }
        }
    }

    let Some(view) = views.iter().find(|v| v.view_id == r.target.view) else {
        push(r.loc.0, "unknown-view", format!("unknown view `{}`", r.target.view));
        return;
    };
    let Some(concept) = view.concept(&r.target.concept) else {
        push(r.loc.0, "unknown-concept", format!("view `{}` has no concept `{}`", view.view_id, r.target.concept));
        return;
    };

    for f in &concept.fields {
        if r.binding(&f.name).is_none() {
            push(r.loc.0, "unbound-field", format!("field `{}` of {} is not bound", f.name, r.target));
        }
    }
    for b in &r.bindings {
        let pos = b.loc.0;
        let Some(field) = concept.field(&b.field) else {
            push(pos, "unknown-field", format!("{} has no field `{}`", r.target, b.field));
            continue;
        };
        let Some(src) = src else { continue };
        let kind = match &b.expr {
            Expr::Literal(v) => literal_kind(v),
            Expr::Attr(a) => match src.attribute_kind(a) {
                Some(k) => k,
                None => {
                    push(pos, "unknown-attribute", format!("type `{}` has no attribute `{a}`", src.name));
                    continue;
                }
            },
            Expr::PathAttr { path, attr } => {
                let end = match type_path(dm, vec![src.name.as_str()], path) {
                    Ok(end) => end,
                    Err(msg) => {
                        push(pos, "path-type", msg);
                        continue;
                    }
                };
                // Single-typed relations give a single end type.
                let end_ty = dm.domain_type(end[0]).expect("relation endpoint types exist");
                match end_ty.attribute_kind(attr) {
                    Some(k) => k,
                    None => {
                        push(
                            pos,
                            "unknown-attribute",
                            format!("type `{}` reached by the walk has no attribute `{attr}`", end_ty.name),
                        );
                        continue;
                    }
                }
            }
        };
        if !kind.assignable_to(&field.kind) {
            push(
                pos,
                "kind-mismatch",
                format!("field `{}` is {}, expression `{}` is {kind}", field.name, field.kind, b.expr),
            );
        }
    }
}

fn literal_kind(v: &Value) -> ScalarKind {
    match v {
        Value::Str(_) => ScalarKind::String,
        Value::Int(_) => ScalarKind::Integer,
        Value::Date(_) => ScalarKind::Date,
        Value::Sym(s) => ScalarKind::Enum(vec![s.clone()]),
    }
}

/// Types reached by `path` from nodes of the `start` types. Every step must
/// name a known relation whose near endpoint is one of the current types.
fn type_path<'a>(dm: &'a DomainModel, start: Vec<&'a str>, path: &PathExpression) -> Result<Vec<&'a str>, String> {
    let mut current = start;
    for (i, step) in path.steps().iter().enumerate() {
        let Some(rel) = dm.relation(&step.relation) else {
            return Err(format!("unknown relation `{}` in path step {}", step.relation, i + 1));
        };
        let (near, far) = match step.direction {
            Direction::Forward => (&rel.source_type, &rel.target_type),
            Direction::Backward => (&rel.target_type, &rel.source_type),
        };
        if !current.contains(&near.as_str()) {
            return Err(format!(
                "path step {} `{}.{}` leaves from `{near}`, but the walk is at {}",
                i + 1,
                step.relation,
                step.direction.suffix(),
                current.iter().map(|t| format!("`{t}`")).collect::<Vec<_>>().join(", ")
            ));
        }
        current = vec![far.as_str()];
    }
    Ok(current)
}

/// `coordinator` plus every value the domain model allows for a `role`
/// attribute.
pub fn declared_roles(dm: &DomainModel) -> BTreeSet<String> {
    let mut roles = BTreeSet::from([super::COORDINATOR_ROLE.to_string()]);
    for t in &dm.types {
        if let Some(a) = t.attribute(ROLE_ATTRIBUTE) {
            if let ScalarKind::Enum(vals) = &a.kind {
                roles.extend(vals.iter().cloned());
            }
        }
    }
    roles
}
