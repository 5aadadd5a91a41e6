//! Scalar kinds and values shared by domain models, context graphs and view
//! content.

use std::cmp::Ordering;
use std::fmt;

use chrono::NaiveDate;

use crate::syntax::{quote, Cursor, ParseError, Tok};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ScalarKind {
    String,
    Integer,
    Date,
    /// Allowed values in declaration order.
    Enum(Vec<String>),
}

impl ScalarKind {
    pub fn accepts(&self, v: &Value) -> bool {
        match (self, v) {
            (ScalarKind::String, Value::Str(_)) => true,
            (ScalarKind::Integer, Value::Int(_)) => true,
            (ScalarKind::Date, Value::Date(_)) => true,
            (ScalarKind::Enum(vals), Value::Sym(s)) => vals.iter().any(|x| x == s),
            _ => false,
        }
    }

    /// Whether a value of kind `self` may be stored in a field of kind `target`.
    /// Enums widen to strings and to any enum that contains all their values.
    pub fn assignable_to(&self, target: &ScalarKind) -> bool {
        match (self, target) {
            (ScalarKind::Enum(_), ScalarKind::String) => true,
            (ScalarKind::Enum(src), ScalarKind::Enum(dst)) => src.iter().all(|v| dst.contains(v)),
            (a, b) => a == b,
        }
    }

    pub fn is_enum(&self) -> bool {
        matches!(self, ScalarKind::Enum(_))
    }

    /// Parses `string | integer | date | enum(v1, v2, ...)`.
    pub(crate) fn parse(cur: &mut Cursor) -> Result<ScalarKind, ParseError> {
        let (word, pos) = cur.expect_ident("a scalar kind")?;
        match word.as_str() {
            "string" => Ok(ScalarKind::String),
            "integer" => Ok(ScalarKind::Integer),
            "date" => Ok(ScalarKind::Date),
            "enum" => {
                cur.expect_punct("(")?;
                let mut vals: Vec<String> = Vec::new();
                loop {
                    let (v, vpos) = cur.expect_ident("an enum value")?;
                    if vals.contains(&v) {
                        return Err(ParseError::at(vpos, format!("duplicate enum value `{v}`")));
                    }
                    vals.push(v);
                    if !cur.eat_punct(",") {
                        break;
                    }
                }
                cur.expect_punct(")")?;
                Ok(ScalarKind::Enum(vals))
            }
            other => Err(ParseError::at(pos, format!("unknown scalar kind `{other}`"))),
        }
    }
}

impl fmt::Display for ScalarKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarKind::String => f.write_str("string"),
            ScalarKind::Integer => f.write_str("integer"),
            ScalarKind::Date => f.write_str("date"),
            ScalarKind::Enum(vals) => write!(f, "enum({})", vals.join(", ")),
        }
    }
}

/// A scalar attribute or field value.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Str(String),
    Int(i64),
    Date(NaiveDate),
    /// A bare symbol, the representation of enum members.
    Sym(String),
}

impl Value {
    /// Classifies a bare word: integer, ISO date, or symbol.
    pub fn from_word(word: &str) -> Value {
        if let Ok(i) = word.parse::<i64>() {
            return Value::Int(i);
        }
        if let Some(d) = parse_iso_date(word) {
            return Value::Date(d);
        }
        Value::Sym(word.to_string())
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Value::Str(_) => "string",
            Value::Int(_) => "integer",
            Value::Date(_) => "date",
            Value::Sym(_) => "enum",
        }
    }

    /// The value as text, without quoting.
    pub fn as_text(&self) -> String {
        match self {
            Value::Str(s) | Value::Sym(s) => s.clone(),
            Value::Int(i) => i.to_string(),
            Value::Date(d) => d.format("%Y-%m-%d").to_string(),
        }
    }

    /// Converts to the representation a field of `kind` stores.
    pub fn coerce_to(self, kind: &ScalarKind) -> Value {
        match (self, kind) {
            (Value::Sym(s), ScalarKind::String) => Value::Str(s),
            (v, _) => v,
        }
    }

    /// Ordering between values of the same representation; `None` across
    /// representations and for symbols, which only support equality.
    pub fn compare(&self, other: &Value) -> Option<Ordering> {
        match (self, other) {
            (Value::Str(a), Value::Str(b)) => Some(a.cmp(b)),
            (Value::Int(a), Value::Int(b)) => Some(a.cmp(b)),
            (Value::Date(a), Value::Date(b)) => Some(a.cmp(b)),
            _ => None,
        }
    }

    pub(crate) fn parse(cur: &mut Cursor) -> Result<Value, ParseError> {
        let tok = cur.peek().clone();
        match tok.tok {
            Tok::Str(s) => {
                cur.bump();
                Ok(Value::Str(s))
            }
            Tok::Word(w) => {
                cur.bump();
                if w.contains(':') {
                    return Err(ParseError::at(tok.pos, format!("invalid value `{w}`")));
                }
                let looks_numeric = w.starts_with(|c: char| c.is_ascii_digit() || c == '-');
                let v = Value::from_word(&w);
                if looks_numeric && matches!(v, Value::Sym(_)) {
                    return Err(ParseError::at(tok.pos, format!("`{w}` is neither an integer nor a YYYY-MM-DD date")));
                }
                Ok(v)
            }
            _ => Err(cur.unexpected("a value")),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Str(s) => f.write_str(&quote(s)),
            other => f.write_str(&other.as_text()),
        }
    }
}

pub fn parse_iso_date(s: &str) -> Option<NaiveDate> {
    let b = s.as_bytes();
    if b.len() != 10 || b[4] != b'-' || b[7] != b'-' {
        return None;
    }
    NaiveDate::parse_from_str(s, "%Y-%m-%d").ok()
}
