//! Generated view content and its canonical text document.
//!
//! ```text
//! content planning version 1
//!
//! element Task "tache:T01" {
//!   end = 2007-03-09
//!   id = "tache:T01"
//! }
//! ```

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::syntax::{Cursor, LexOptions, ParseError, Tok};
use crate::value::Value;

/// Identity of an element within a view: `Concept/key`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ElementKey {
    pub concept: String,
    pub key: String,
}

impl ElementKey {
    pub fn new(concept: impl Into<String>, key: impl Into<String>) -> Self {
        ElementKey { concept: concept.into(), key: key.into() }
    }
}

impl fmt::Display for ElementKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.concept, self.key)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("element key `{0}` is not of the form Concept/key")]
pub struct BadElementKey(pub String);

impl FromStr for ElementKey {
    type Err = BadElementKey;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.split_once('/') {
            Some((c, k)) if !c.is_empty() && !k.is_empty() => Ok(ElementKey::new(c, k)),
            _ => Err(BadElementKey(s.to_string())),
        }
    }
}

impl Serialize for ElementKey {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ElementKey {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Element {
    pub concept: String,
    pub key: String,
    pub fields: BTreeMap<String, Value>,
}

impl Element {
    pub fn element_key(&self) -> ElementKey {
        ElementKey::new(self.concept.clone(), self.key.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ViewContent {
    pub view_id: String,
    pub graph_version: u64,
    /// Ordered by `(concept, key)`.
    pub elements: Vec<Element>,
}

impl ViewContent {
    pub fn empty(view_id: impl Into<String>, graph_version: u64) -> Self {
        ViewContent { view_id: view_id.into(), graph_version, elements: Vec::new() }
    }

    pub fn keys(&self) -> impl Iterator<Item = ElementKey> + '_ {
        self.elements.iter().map(Element::element_key)
    }

    pub fn get(&self, key: &ElementKey) -> Option<&Element> {
        self.elements.iter().find(|e| e.concept == key.concept && e.key == key.key)
    }

    pub fn sort(&mut self) {
        self.elements.sort_by(|a, b| (&a.concept, &a.key).cmp(&(&b.concept, &b.key)));
    }

    /// Canonical text document.
    pub fn to_document(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "content {} version {}", self.view_id, self.graph_version);
        for e in &self.elements {
            let _ = writeln!(out, "\nelement {} {} {{", e.concept, Value::Str(e.key.clone()));
            for (name, v) in &e.fields {
                let _ = writeln!(out, "  {name} = {v}");
            }
            out.push_str("}\n");
        }
        out
    }

    pub fn parse_document(text: &str) -> Result<ViewContent, ParseError> {
        let mut cur = Cursor::new(text, LexOptions::default())?;
        cur.expect_keyword("content")?;
        let (view_id, _) = cur.expect_ident("a view id")?;
        cur.expect_keyword("version")?;
        let (v, vpos) = cur.expect_word("a graph version")?;
        let graph_version =
            v.parse::<u64>().map_err(|_| ParseError::at(vpos, format!("invalid graph version `{v}`")))?;
        let mut elements = Vec::new();
        while !cur.at_eof() {
            cur.expect_keyword("element")?;
            let (concept, _) = cur.expect_ident("a concept name")?;
            let key = match cur.peek().tok.clone() {
                Tok::Str(s) => {
                    cur.bump();
                    s
                }
                _ => return Err(cur.unexpected("a quoted element key")),
            };
            cur.expect_punct("{")?;
            let mut fields = BTreeMap::new();
            while !cur.eat_punct("}") {
                let (name, pos) = cur.expect_ident("a field name or `}`")?;
                cur.expect_punct("=")?;
                let value = Value::parse(&mut cur)?;
                if fields.insert(name.clone(), value).is_some() {
                    return Err(ParseError::at(pos, format!("field `{name}` set twice")));
                }
            }
            elements.push(Element { concept, key, fields });
        }
        Ok(ViewContent { view_id, graph_version, elements })
    }
}
