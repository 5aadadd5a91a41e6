use std::fmt::Write as _;

use crate::syntax::{is_ident, Cursor, LexOptions, ParseError, Position};
use crate::value::ScalarKind;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldDecl {
    pub name: String,
    pub kind: ScalarKind,
    /// Target concept when the field references another element of the view.
    pub link: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Concept {
    pub name: String,
    pub key_field: String,
    pub fields: Vec<FieldDecl>,
}

impl Concept {
    pub fn field(&self, name: &str) -> Option<&FieldDecl> {
        self.fields.iter().find(|f| f.name == name)
    }
}

/// The concepts one view displays.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ViewConceptModel {
    pub view_id: String,
    pub concepts: Vec<Concept>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("view `{view}`: {message}")]
pub struct ViewModelError {
    pub view: String,
    /// Offending concept, when the problem is local to one.
    pub concept: Option<String>,
    pub message: String,
}

impl ViewConceptModel {
    pub fn new(view_id: impl Into<String>, concepts: Vec<Concept>) -> Result<Self, ViewModelError> {
        let v = ViewConceptModel { view_id: view_id.into(), concepts };
        v.check()?;
        Ok(v)
    }

    pub fn concept(&self, name: &str) -> Option<&Concept> {
        self.concepts.iter().find(|c| c.name == name)
    }

    /// `(concept, field, target concept)` for every link field.
    pub fn intra_view_links(&self) -> Vec<(&str, &str, &str)> {
        self.concepts
            .iter()
            .flat_map(|c| {
                c.fields.iter().filter_map(move |f| f.link.as_deref().map(|t| (c.name.as_str(), f.name.as_str(), t)))
            })
            .collect()
    }

    fn check(&self) -> Result<(), ViewModelError> {
        let err = |concept: Option<&str>, message: String| ViewModelError {
            view: self.view_id.clone(),
            concept: concept.map(str::to_string),
            message,
        };
        if !is_ident(&self.view_id) {
            return Err(err(None, "view id must be an identifier".into()));
        }
        for (i, c) in self.concepts.iter().enumerate() {
            let name = Some(c.name.as_str());
            if self.concepts[..i].iter().any(|o| o.name == c.name) {
                return Err(err(name, format!("duplicate concept `{}`", c.name)));
            }
            for (j, f) in c.fields.iter().enumerate() {
                if c.fields[..j].iter().any(|o| o.name == f.name) {
                    return Err(err(name, format!("duplicate field `{}.{}`", c.name, f.name)));
                }
                if let Some(target) = &f.link {
                    if f.kind != ScalarKind::String {
                        return Err(err(name, format!("link field `{}.{}` must be a string", c.name, f.name)));
                    }
                    if !self.concepts.iter().any(|o| &o.name == target) {
                        return Err(err(
                            name,
                            format!("link field `{}.{}` targets unknown concept `{target}`", c.name, f.name),
                        ));
                    }
                }
            }
            match c.field(&c.key_field) {
                None => return Err(err(name, format!("key field `{}` is not declared in `{}`", c.key_field, c.name))),
                Some(f) if f.kind != ScalarKind::String => {
                    return Err(err(name, format!("key field `{}.{}` must be a string", c.name, c.key_field)))
                }
                Some(_) => {}
            }
        }
        Ok(())
    }

    /// The same model with concepts and fields sorted by name.
    pub fn canonical(&self) -> ViewConceptModel {
        let mut v = self.clone();
        v.concepts.sort_by(|a, b| a.name.cmp(&b.name));
        for c in &mut v.concepts {
            c.fields.sort_by(|a, b| a.name.cmp(&b.name));
        }
        v
    }
}

/// Parses a `.cvm` file, which may declare several views.
pub fn parse_view_models(text: &str) -> Result<Vec<ViewConceptModel>, ParseError> {
    let mut cur = Cursor::new(text, LexOptions::default())?;
    let mut views: Vec<ViewConceptModel> = Vec::new();
    while !cur.at_eof() {
        let vpos = cur.expect_keyword("view")?;
        let (view_id, idpos) = cur.expect_ident("a view id")?;
        if views.iter().any(|v| v.view_id == view_id) {
            return Err(ParseError::at(idpos, format!("duplicate view `{view_id}`")));
        }
        let mut concepts = Vec::new();
        let mut positions: Vec<(String, Position)> = Vec::new();
        while cur.is_keyword("concept") {
            let cpos = cur.bump().pos;
            let (name, _) = cur.expect_ident("a concept name")?;
            positions.push((name.clone(), cpos));
            cur.expect_keyword("key")?;
            let (key_field, _) = cur.expect_ident("a key field name")?;
            cur.expect_punct("{")?;
            let mut fields = Vec::new();
            while !cur.eat_punct("}") {
                let (fname, _) = cur.expect_ident("a field name or `}`")?;
                cur.expect_punct(":")?;
                let kind = ScalarKind::parse(&mut cur)?;
                let link = if cur.eat_punct("->") { Some(cur.expect_ident("a target concept")?.0) } else { None };
                fields.push(FieldDecl { name: fname, kind, link });
                cur.eat_punct(",");
            }
            concepts.push(Concept { name, key_field, fields });
        }
        let view = ViewConceptModel::new(view_id, concepts).map_err(|e| {
            let pos =
                e.concept.as_ref().and_then(|c| positions.iter().rev().find(|(n, _)| n == c)).map_or(vpos, |(_, p)| *p);
            ParseError::at(pos, e.to_string())
        })?;
        views.push(view);
    }
    Ok(views)
}

/// Text for one view in `.cvm` notation, in the model's own order.
pub fn print_view_model(v: &ViewConceptModel) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "view {}", v.view_id);
    for c in &v.concepts {
        let _ = writeln!(out, "concept {} key {} {{", c.name, c.key_field);
        for f in &c.fields {
            let _ = write!(out, "  {}: {}", f.name, f.kind);
            if let Some(t) = &f.link {
                let _ = write!(out, " -> {t}");
            }
            out.push('\n');
        }
        out.push_str("}\n");
    }
    out
}

/// The report, planning, mockup and remarks-list views.
pub fn builtin_views() -> Vec<ViewConceptModel> {
    parse_view_models(include_str!("builtin.cvm")).expect("built-in view models are well formed")
}
