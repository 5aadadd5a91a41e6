//! The `.cvt` transformation language: rules that turn context-graph nodes
//! into view elements, plus per-view visibility paths for trade roles.

mod ast;
mod check;
mod generate;
mod parse;
mod print;

pub use ast::{Binding, CmpOp, Condition, Expr, Loc, Rule, RuleSet, Target, Visibility};
pub use check::{check_rules, declared_roles, RuleIssue, ROLE_ATTRIBUTE};
pub use generate::{
    generate, role_holders, visible_nodes, GenerateError, RoleFilter, TraceMap, ViewTrace, COORDINATOR_ROLE,
};
pub use parse::parse_rules;
pub use print::print_rules;
