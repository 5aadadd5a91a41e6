use std::fmt::Write as _;

use super::{builtin_metamodel, MetaEntityKind};
use crate::syntax::{Cursor, LexOptions, ParseError, Position};
use crate::value::ScalarKind;

/// Every node exposes its id under this name; it cannot be declared.
pub const ID_ATTRIBUTE: &str = "id";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttributeDecl {
    pub name: String,
    pub kind: ScalarKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainType {
    pub name: String,
    pub meta_kind: MetaEntityKind,
    pub attributes: Vec<AttributeDecl>,
}

impl DomainType {
    pub fn attribute(&self, name: &str) -> Option<&AttributeDecl> {
        self.attributes.iter().find(|a| a.name == name)
    }

    /// Kind of `src.<name>`, including the implicit `id`.
    pub fn attribute_kind(&self, name: &str) -> Option<ScalarKind> {
        if name == ID_ATTRIBUTE {
            return Some(ScalarKind::String);
        }
        self.attribute(name).map(|a| a.kind.clone())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cardinality {
    /// At most one outgoing edge per source node.
    One,
    Many,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainRelation {
    pub name: String,
    pub meta_relation: String,
    pub source_type: String,
    pub target_type: String,
    pub cardinality: Cardinality,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainModel {
    pub name: String,
    pub types: Vec<DomainType>,
    pub relations: Vec<DomainRelation>,
}

impl DomainModel {
    pub fn domain_type(&self, name: &str) -> Option<&DomainType> {
        self.types.iter().find(|t| t.name == name)
    }

    pub fn relation(&self, name: &str) -> Option<&DomainRelation> {
        self.relations.iter().find(|r| r.name == name)
    }

    /// Relations whose metamodel relation kind is one of `kinds`.
    pub fn relations_of_kind<'a>(&'a self, kinds: &'a [&str]) -> impl Iterator<Item = &'a DomainRelation> + 'a {
        self.relations.iter().filter(move |r| kinds.contains(&r.meta_relation.as_str()))
    }
}

const DEFAULT_MODEL_NAME: &str = "model";

/// Parses a `.cdm` domain model and checks it against the metamodel.
pub fn parse_domain_model(text: &str) -> Result<DomainModel, ParseError> {
    let mm = builtin_metamodel();
    let mut cur = Cursor::new(text, LexOptions::default())?;
    let mut name = DEFAULT_MODEL_NAME.to_string();
    if cur.eat_keyword("model") {
        name = cur.expect_ident("a model name")?.0;
    }

    let mut types: Vec<DomainType> = Vec::new();
    let mut relations: Vec<(DomainRelation, Position)> = Vec::new();
    while !cur.at_eof() {
        if cur.eat_keyword("type") {
            let (tname, tpos) = cur.expect_ident("a type name")?;
            if types.iter().any(|t| t.name == tname) {
                return Err(ParseError::at(tpos, format!("duplicate type name `{tname}`")));
            }
            cur.expect_punct(":")?;
            let (kind, kpos) = cur.expect_word("a meta kind")?;
            let meta_kind = MetaEntityKind::parse(&kind).ok_or_else(|| {
                ParseError::at(
                    kpos,
                    format!(
                        "unknown meta kind `{kind}` (expected Actor, Activity, Artifact.Document or Artifact.Object)"
                    ),
                )
            })?;
            let mut attributes: Vec<AttributeDecl> = Vec::new();
            if cur.eat_punct("{") {
                while !cur.eat_punct("}") {
                    let (aname, apos) = cur.expect_ident("an attribute name or `}`")?;
                    if aname == ID_ATTRIBUTE {
                        return Err(ParseError::at(apos, "`id` is implicit and cannot be declared"));
                    }
                    if attributes.iter().any(|a| a.name == aname) {
                        return Err(ParseError::at(apos, format!("duplicate attribute `{aname}` in type `{tname}`")));
                    }
                    cur.expect_punct(":")?;
                    let kind = ScalarKind::parse(&mut cur)?;
                    attributes.push(AttributeDecl { name: aname, kind });
                    cur.eat_punct(",");
                }
            }
            types.push(DomainType { name: tname, meta_kind, attributes });
        } else if cur.eat_keyword("relation") {
            let (rname, rpos) = cur.expect_ident("a relation name")?;
            if relations.iter().any(|(r, _)| r.name == rname) {
                return Err(ParseError::at(rpos, format!("duplicate relation name `{rname}`")));
            }
            cur.expect_punct(":")?;
            let (source_type, _) = cur.expect_ident("a source type")?;
            cur.expect_punct("->")?;
            let (target_type, _) = cur.expect_ident("a target type")?;
            cur.expect_keyword("via")?;
            let (meta_relation, mpos) = cur.expect_ident("a metamodel relation kind")?;
            if mm.relation_kind(&meta_relation).is_none() {
                return Err(ParseError::at(mpos, format!("unknown metamodel relation kind `{meta_relation}`")));
            }
            let cardinality = if cur.eat_keyword("one") {
                Cardinality::One
            } else {
                cur.eat_keyword("many");
                Cardinality::Many
            };
            relations
                .push((DomainRelation { name: rname, meta_relation, source_type, target_type, cardinality }, rpos));
        } else {
            return Err(cur.unexpected("`type` or `relation`"));
        }
    }

    // Endpoint checks run after all types are known so declaration order is free.
    for (r, pos) in &relations {
        let find = |n: &str| types.iter().find(|t| t.name == n);
        let src = find(&r.source_type)
            .ok_or_else(|| ParseError::at(*pos, format!("relation `{}`: unknown type `{}`", r.name, r.source_type)))?;
        let tgt = find(&r.target_type)
            .ok_or_else(|| ParseError::at(*pos, format!("relation `{}`: unknown type `{}`", r.name, r.target_type)))?;
        let meta = mm.relation_kind(&r.meta_relation).expect("checked above");
        if !meta.admits(src.meta_kind, tgt.meta_kind) {
            return Err(ParseError::at(
                *pos,
                format!(
                    "kind mismatch in relation `{}`: `{}` expects {} -> {}, found {} -> {}",
                    r.name, meta.name, meta.source, meta.target, src.meta_kind, tgt.meta_kind
                ),
            ));
        }
    }

    Ok(DomainModel { name, types, relations: relations.into_iter().map(|(r, _)| r).collect() })
}

/// Canonical text for a domain model; parses back to an equal model.
pub fn print_domain_model(dm: &DomainModel) -> String {
    let mut out = String::new();
    if dm.name != DEFAULT_MODEL_NAME {
        let _ = writeln!(out, "model {}\n", dm.name);
    }
    for t in &dm.types {
        if t.attributes.is_empty() {
            let _ = writeln!(out, "type {} : {} {{}}", t.name, t.meta_kind);
            continue;
        }
        let _ = writeln!(out, "type {} : {} {{", t.name, t.meta_kind);
        for a in &t.attributes {
            let _ = writeln!(out, "  {}: {}", a.name, a.kind);
        }
        out.push_str("}\n");
    }
    if !dm.types.is_empty() && !dm.relations.is_empty() {
        out.push('\n');
    }
    for r in &dm.relations {
        let card = match r.cardinality {
            Cardinality::One => "one",
            Cardinality::Many => "many",
        };
        let _ = writeln!(
            out,
            "relation {} : {} -> {} via {} {}",
            r.name, r.source_type, r.target_type, r.meta_relation, card
        );
    }
    out
}
