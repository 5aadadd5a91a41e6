use std::collections::{BTreeSet, HashSet};
use std::fmt::Write as _;

use super::content::ViewContent;
use super::model::{parse_view_models, ViewConceptModel};
use crate::metamodel::{ValidationReport, Violation};
use crate::syntax::{ParseError, Position};
use crate::value::Value;

/// Canonical schema document of a view (`.cvs`), plus its parsed form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ViewSchema {
    pub view_id: String,
    pub document: String,
    model: ViewConceptModel,
}

impl ViewSchema {
    /// Reads a schema document. The stored document is the canonical
    /// re-emission, so non-canonical input is normalized.
    pub fn parse(text: &str) -> Result<ViewSchema, ParseError> {
        let mut views = parse_view_models(text)?;
        if views.len() != 1 {
            return Err(ParseError::at(
                Position::new(1, 1),
                format!("a schema describes exactly one view, found {}", views.len()),
            ));
        }
        Ok(emit_schema(&views.remove(0)))
    }

    /// The concept model in canonical order.
    pub fn model(&self) -> &ViewConceptModel {
        &self.model
    }
}

pub fn emit_schema(v: &ViewConceptModel) -> ViewSchema {
    let model = v.canonical();
    let mut doc = String::new();
    let _ = writeln!(doc, "view {}", model.view_id);
    for c in &model.concepts {
        let _ = writeln!(doc, "\nconcept {} key {} {{", c.name, c.key_field);
        for f in &c.fields {
            let _ = write!(doc, "  {}: {}", f.name, f.kind);
            if let Some(t) = &f.link {
                let _ = write!(doc, " -> {t}");
            }
            doc.push('\n');
        }
        doc.push_str("}\n");
    }
    ViewSchema { view_id: model.view_id.clone(), document: doc, model }
}

/// Checks every element of `content` against the schema: declared concept,
/// exactly the declared fields with the right kinds, key field equal to the
/// element key, unique keys, and link fields that resolve within the view.
pub fn validate_content(schema: &ViewSchema, content: &ViewContent) -> ValidationReport {
    let model = &schema.model;
    let mut out = Vec::new();
    if content.view_id != model.view_id {
        out.push(Violation::new(
            content.view_id.as_str(),
            "view-mismatch",
            format!("content for view `{}` checked against schema `{}`", content.view_id, model.view_id),
        ));
    }

    let keys: BTreeSet<(&str, &str)> = content.elements.iter().map(|e| (e.concept.as_str(), e.key.as_str())).collect();
    let mut seen: HashSet<(&str, &str)> = HashSet::new();

    for e in &content.elements {
        let subject = e.element_key().to_string();
        if !seen.insert((e.concept.as_str(), e.key.as_str())) {
            out.push(Violation::new(subject.as_str(), "duplicate-key", "element key appears more than once"));
        }
        let Some(concept) = model.concept(&e.concept) else {
            out.push(Violation::new(
                subject,
                "unknown-concept",
                format!("view `{}` declares no concept `{}`", model.view_id, e.concept),
            ));
            continue;
        };
        for f in &concept.fields {
            match e.fields.get(&f.name) {
                None => {
                    out.push(Violation::new(subject.as_str(), "missing-field", format!("missing field `{}`", f.name)))
                }
                Some(v) if !f.kind.accepts(v) => out.push(Violation::new(
                    subject.as_str(),
                    "field-kind",
                    format!("field `{}` expects {}, found {} `{}`", f.name, f.kind, v.kind_name(), v.as_text()),
                )),
                Some(v) => {
                    if let (Some(target), Value::Str(k)) = (&f.link, v) {
                        if !keys.contains(&(target.as_str(), k.as_str())) {
                            out.push(Violation::new(
                                subject.as_str(),
                                "dangling-link",
                                format!("field `{}` references missing {target} `{k}`", f.name),
                            ));
                        }
                    }
                }
            }
        }
        for name in e.fields.keys() {
            if concept.field(name).is_none() {
                out.push(Violation::new(
                    subject.as_str(),
                    "unknown-field",
                    format!("concept `{}` declares no field `{name}`", concept.name),
                ));
            }
        }
        if let Some(Value::Str(k)) = e.fields.get(&concept.key_field) {
            if *k != e.key {
                out.push(Violation::new(
                    subject.as_str(),
                    "key-mismatch",
                    format!("key field `{}` is `{k}` but the element key is `{}`", concept.key_field, e.key),
                ));
            }
        }
    }
    ValidationReport::from_violations(out)
}
