use std::fmt::Write as _;

use super::ast::{Rule, RuleSet};

/// Canonical text of a rule set. Reparsing it yields an equal rule set.
pub fn print_rules(rs: &RuleSet) -> String {
    let mut out = String::new();
    for (i, r) in rs.rules.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        print_rule(&mut out, r);
    }
    if !rs.visibility.is_empty() {
        if !rs.rules.is_empty() {
            out.push('\n');
        }
        for v in &rs.visibility {
            let _ = writeln!(out, "visible {} via walk({})", v.view, v.path);
        }
    }
    out
}

fn print_rule(out: &mut String, r: &Rule) {
    let _ = writeln!(out, "rule {} {{", r.name);
    let _ = writeln!(out, "  from {}", r.source_type);
    if !r.guard.is_empty() {
        let conds: Vec<String> = r.guard.iter().map(|c| c.to_string()).collect();
        let _ = writeln!(out, "  where {}", conds.join(" and "));
    }
    if r.bindings.is_empty() {
        let _ = writeln!(out, "  to {} {{}}", r.target);
    } else {
        let _ = writeln!(out, "  to {} {{", r.target);
        for (i, b) in r.bindings.iter().enumerate() {
            let sep = if i + 1 < r.bindings.len() { "," } else { "" };
            let _ = writeln!(out, "    {} := {}{sep}", b.field, b.expr);
        }
        out.push_str("  }\n");
    }
    out.push_str("}\n");
}
