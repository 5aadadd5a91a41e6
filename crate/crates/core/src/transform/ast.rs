use std::fmt;

use crate::context::PathExpression;
use crate::syntax::Position;
use crate::value::Value;

/// A source location kept for diagnostics. It never takes part in
/// equality, so a reparsed rule set compares equal to the original.
#[derive(Debug, Clone, Copy, Default)]
pub struct Loc(pub Position);

impl PartialEq for Loc {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl Eq for Loc {}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RuleSet {
    pub rules: Vec<Rule>,
    pub visibility: Vec<Visibility>,
}

impl RuleSet {
    pub fn is_empty(&self) -> bool {
        self.rules.is_empty() && self.visibility.is_empty()
    }

    pub fn rule(&self, name: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| r.name == name)
    }

    pub fn rules_for_view<'a>(&'a self, view: &'a str) -> impl Iterator<Item = &'a Rule> + 'a {
        self.rules.iter().filter(move |r| r.target.view == view)
    }

    pub fn visibility_for<'a>(&'a self, view: &'a str) -> impl Iterator<Item = &'a Visibility> + 'a {
        self.visibility.iter().filter(move |v| v.view == view)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Target {
    pub view: String,
    pub concept: String,
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.view, self.concept)
    }
}

/// `rule <name> { from <type> [where ...] to <view>.<Concept> { ... } }`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub name: String,
    pub source_type: String,
    /// Conjunction; empty means always true.
    pub guard: Vec<Condition>,
    pub target: Target,
    pub bindings: Vec<Binding>,
    pub loc: Loc,
}

impl Rule {
    pub fn binding(&self, field: &str) -> Option<&Binding> {
        self.bindings.iter().find(|b| b.field == field)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Binding {
    pub field: String,
    pub expr: Expr,
    pub loc: Loc,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    /// `src.<attr>`
    Attr(String),
    Literal(Value),
    /// `first(walk(<path>)).<attr>`, starting from the source node.
    PathAttr {
        path: PathExpression,
        attr: String,
    },
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Attr(a) => write!(f, "src.{a}"),
            Expr::Literal(v) => write!(f, "{v}"),
            Expr::PathAttr { path, attr } => write!(f, "first(walk({path})).{attr}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }

    pub fn from_symbol(s: &str) -> Option<CmpOp> {
        Some(match s {
            "=" => CmpOp::Eq,
            "!=" => CmpOp::Ne,
            "<" => CmpOp::Lt,
            "<=" => CmpOp::Le,
            ">" => CmpOp::Gt,
            ">=" => CmpOp::Ge,
            _ => return None,
        })
    }

    pub fn is_ordering(self) -> bool {
        !matches!(self, CmpOp::Eq | CmpOp::Ne)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Condition {
    /// `src.<attr> <op> <literal>`
    Compare { attr: String, op: CmpOp, value: Value, loc: Loc },
    /// `role = <id>`; the coordinator satisfies every role condition.
    Role { role: String, loc: Loc },
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Condition::Compare { attr, op, value, .. } => write!(f, "src.{attr} {} {value}", op.symbol()),
            Condition::Role { role, .. } => write!(f, "role = {role}"),
        }
    }
}

/// `visible <view> via walk(<path>)`: for a trade role, elements of `view`
/// stay visible when their trace meets the nodes reached by walking `path`
/// from the actors holding that role.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Visibility {
    pub view: String,
    pub path: PathExpression,
    pub loc: Loc,
}
