//! Random rule files and a corpus of malformed ones.

use std::collections::BTreeSet;

use chrono::NaiveDate;
use coopsync::context::{Direction, PathExpression, PathStep};
use coopsync::transform::{
    check_rules, parse_rules, print_rules, Binding, CmpOp, Condition, Expr, Loc, Rule, RuleSet, Target, Visibility,
};
use coopsync::value::Value;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::gen;

// Random guards and visibility paths over the fixture rule set.

pub const VISIBILITY_POOL: [&str; 8] = [
    "realise.fwd",
    "realise.fwd / realise.bwd",
    "realise.fwd / concerne.fwd",
    "realise.fwd / concerne.fwd / porte_sur.bwd",
    "realise.fwd / concerne.fwd / porte_sur.bwd / consigne_dans.fwd",
    "redige.fwd",
    "redige.fwd / consigne_dans.bwd",
    "realise.fwd / precede.fwd",
];

fn random_guard(r: &mut ChaCha8Rng, source_type: &str) -> Option<String> {
    let ops = ["=", "!=", "<", "<=", ">", ">="];
    let d = format!("2007-{:02}-{:02}", r.gen_range(1..=12), r.gen_range(1..=28));
    let cond = match (source_type, r.gen_range(0..4)) {
        (_, 0) => format!("role = {}", gen::ROLES[r.gen_range(1..4)]),
        ("TacheConstruction", 1) => {
            format!("src.state {} {}", ["=", "!="][r.gen_range(0..2)], ["planned", "done", "late"][r.gen_range(0..3)])
        }
        ("TacheConstruction", _) => {
            format!("src.{} {} {d}", ["start", "end"][r.gen_range(0..2)], ops.choose(r).unwrap())
        }
        ("Remarque", 1) => format!("src.status = {}", ["open", "closed"][r.gen_range(0..2)]),
        ("Remarque", _) => format!("src.number {} {}", ops.choose(r).unwrap(), r.gen_range(0..30)),
        ("CompteRendu", _) => format!("src.date {} {d}", ops.choose(r).unwrap()),
        ("Ouvrage", _) => format!("src.name {} \"Mur\"", ["=", "!=", "<", ">="][r.gen_range(0..4)]),
        _ => return None,
    };
    Some(cond)
}

/// The fixture rules with random extra guards (never on the link target
/// `Resources`) and a random subset of visibility paths per view.
pub fn fixture_variant(r: &mut ChaCha8Rng) -> RuleSet {
    let base = super::rules();
    let mut text = String::new();
    for rule in &base.rules {
        let mut guard: Vec<String> = rule.guard.iter().map(|c| c.to_string()).collect();
        if rule.name != "Resources" {
            for _ in 0..r.gen_range(0..3) {
                guard.extend(random_guard(r, &rule.source_type));
            }
        }
        let mut one = RuleSet::default();
        let mut copy = rule.clone();
        copy.guard = Vec::new();
        one.rules.push(copy);
        let printed = print_rules(&one);
        let printed = if guard.is_empty() {
            printed
        } else {
            printed.replacen("\n  to ", &format!("\n  where {}\n  to ", guard.join(" and ")), 1)
        };
        text.push_str(&printed);
        text.push('\n');
    }
    for v in ["planning", "mockup", "report", "remarks_list"] {
        for p in VISIBILITY_POOL {
            if r.gen_bool(0.3) {
                text.push_str(&format!("visible {v} via walk({p})\n"));
            }
        }
    }
    let rs = parse_rules(&text).unwrap_or_else(|e| panic!("{e}\n{text}"));
    assert!(check_rules(&rs, &super::model(), &super::views()).is_empty(), "{text}");
    rs
}

// Malformed rule files and the position each error must carry.
pub const MALFORMED: [(&str, u32, u32); 20] = [
    ("rule R {\n  from Ouvrage\n  mockup.Object3D { id := src.id }\n}\n", 3, 3),
    ("rule R {\n  from Ouvrage\n  to mockup.Object3D { id := src.id }\n", 4, 1),
    ("rule R {\n  from Ouvrage\n  to mockup.Object3D { label := \"abc\n  }\n}", 3, 33),
    (
        "rule A {\n  from Ouvrage\n  to mockup.Object3D { id := src.id }\n}\n\nrule A {\n  from Ouvrage\n  to mockup.Object3D { id := src.id }\n}\n",
        6,
        6,
    ),
    ("rule R {\n  from Ouvrage\n  to mockup.Object3D {\n    id := src.id,\n    id := src.name\n  }\n}\n", 5, 5),
    ("visible planning via walk(realise.up)", 1, 27),
    ("rule R {\n  from Ouvrage\n  to mockup.Object3D { id = src.id }\n}", 3, 27),
    ("rule R {\n  from Ouvrage\n  to mockup { id := src.id }\n}", 3, 6),
    ("rule R {\n  from Tache\n  where label = \"x\"\n  to planning.Task {}\n}", 3, 9),
    ("rule R {\n  from Tache\n  where src.label \"x\"\n  to planning.Task {}\n}", 3, 19),
    ("rule R {\n  from Tache\n  where src.state = a.b\n  to planning.Task {}\n}", 3, 21),
    ("rule R {\n  from Tache\n  where src.start >= 2007-13-45\n  to planning.Task {}\n}", 3, 22),
    ("rule R {\n  from Ouvrage\n  to mockup.Object3D { id := src.id @ }\n}", 3, 37),
    ("rule R {\n  from Ouvrage\n  to mockup.Object3D { label := \"a\\qb\" }\n}", 3, 35),
    ("# rules\n\nview planning\n", 3, 1),
    ("visible planning via realise.fwd", 1, 22),
    ("visible planning walk(realise.fwd)", 1, 18),
    ("rule R {\n  from Tache\n  to planning.Task {\n    resource := first(realise.bwd).id\n  }\n}", 4, 23),
    ("rule R {\n  from Tache\n  to planning.Task {\n    label := src\n  }\n}", 4, 14),
    ("rule R {\n  from Ouvrage\n  to mockup.Object3D {\n    id := src.id\n    label := src.name\n  }\n}", 5, 5),
];

// Random well-formed rule sets, rendered with irregular layout.

const ATOMS: [&str; 12] = ["a", "b_2", "Tache", "first", "walk", "and", "to", "where", "fwd", "rule", "_x", "Z9"];
const TEXTS: [&str; 6] = ["", "plain", "with \"quotes\"", "back\\slash", "tab\tand\nnewline", "Élévation n°3"];

fn ident(r: &mut ChaCha8Rng) -> String {
    if r.gen_bool(0.5) {
        ATOMS.choose(r).unwrap().to_string()
    } else {
        let n = r.gen_range(1..8);
        let first = (b'a' + r.gen_range(0..26)) as char;
        std::iter::once(first)
            .chain((1..n).map(|_| {
                *b"abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_".choose(r).unwrap() as char
            }))
            .collect()
    }
}

fn literal(r: &mut ChaCha8Rng) -> Value {
    match r.gen_range(0..4) {
        0 => Value::Str(TEXTS.choose(r).unwrap().to_string()),
        1 => Value::Int(if r.gen_bool(0.1) { i64::MIN } else { r.gen_range(-1000..1000) }),
        2 => Value::Date(
            NaiveDate::from_ymd_opt(r.gen_range(1000..=9999), r.gen_range(1..=12), r.gen_range(1..=28)).unwrap(),
        ),
        _ => loop {
            let s = ident(r);
            if s != "src" {
                break Value::Sym(s);
            }
        },
    }
}

fn path(r: &mut ChaCha8Rng) -> PathExpression {
    let steps = (0..r.gen_range(1..4))
        .map(|_| PathStep::new(ident(r), if r.gen_bool(0.5) { Direction::Forward } else { Direction::Backward }))
        .collect();
    PathExpression::new(steps).unwrap()
}

pub fn random_rule_set(r: &mut ChaCha8Rng) -> RuleSet {
    let mut rs = RuleSet::default();
    let mut names = BTreeSet::new();
    for _ in 0..r.gen_range(0..5) {
        let name = ident(r);
        if !names.insert(name.clone()) {
            continue;
        }
        let guard = (0..r.gen_range(0..3))
            .map(|_| {
                if r.gen_bool(0.3) {
                    Condition::Role { role: ident(r), loc: Loc::default() }
                } else {
                    let op = [CmpOp::Eq, CmpOp::Ne, CmpOp::Lt, CmpOp::Le, CmpOp::Gt, CmpOp::Ge][r.gen_range(0..6)];
                    Condition::Compare { attr: ident(r), op, value: literal(r), loc: Loc::default() }
                }
            })
            .collect();
        let mut fields = BTreeSet::new();
        let mut bindings = Vec::new();
        for _ in 0..r.gen_range(0..5) {
            let field = ident(r);
            if !fields.insert(field.clone()) {
                continue;
            }
            let expr = match r.gen_range(0..3) {
                0 => Expr::Attr(ident(r)),
                1 => Expr::Literal(literal(r)),
                _ => Expr::PathAttr { path: path(r), attr: ident(r) },
            };
            bindings.push(Binding { field, expr, loc: Loc::default() });
        }
        rs.rules.push(Rule {
            name,
            source_type: ident(r),
            guard,
            target: Target { view: ident(r), concept: ident(r) },
            bindings,
            loc: Loc::default(),
        });
    }
    for _ in 0..r.gen_range(0..4) {
        rs.visibility.push(Visibility { view: ident(r), path: path(r), loc: Loc::default() });
    }
    rs
}

/// Renders a rule set with random whitespace, comments, optional `.fwd`
/// suffixes and optional trailing commas.
pub fn render_noisy(r: &mut ChaCha8Rng, rs: &RuleSet) -> String {
    let mut toks: Vec<String> = Vec::new();
    let walk = |r: &mut ChaCha8Rng, p: &PathExpression, toks: &mut Vec<String>| {
        toks.push("walk".into());
        toks.push("(".into());
        for (i, s) in p.steps().iter().enumerate() {
            if i > 0 {
                toks.push("/".into());
            }
            let omit = s.direction == Direction::Forward && r.gen_bool(0.5);
            toks.push(if omit { s.relation.clone() } else { format!("{}.{}", s.relation, s.direction.suffix()) });
        }
        toks.push(")".into());
    };
    for rule in &rs.rules {
        toks.extend(["rule".into(), rule.name.clone(), "{".into(), "from".into(), rule.source_type.clone()]);
        for (i, c) in rule.guard.iter().enumerate() {
            toks.push(if i == 0 { "where" } else { "and" }.into());
            match c {
                Condition::Role { role, .. } => toks.extend(["role".into(), "=".into(), role.clone()]),
                Condition::Compare { attr, op, value, .. } => {
                    toks.extend([format!("src.{attr}"), op.symbol().into(), value.to_string()])
                }
            }
        }
        toks.extend(["to".into(), rule.target.to_string(), "{".into()]);
        for (i, b) in rule.bindings.iter().enumerate() {
            if i > 0 {
                toks.push(",".into());
            }
            toks.extend([b.field.clone(), ":=".into()]);
            match &b.expr {
                Expr::Attr(a) => toks.push(format!("src.{a}")),
                Expr::Literal(v) => toks.push(v.to_string()),
                Expr::PathAttr { path, attr } => {
                    toks.extend(["first".into(), "(".into()]);
                    walk(r, path, &mut toks);
                    toks.extend([")".into(), ".".into(), attr.clone()]);
                }
            }
        }
        if !rule.bindings.is_empty() && r.gen_bool(0.3) {
            toks.push(",".into());
        }
        toks.extend(["}".into(), "}".into()]);
    }
    for v in &rs.visibility {
        toks.extend(["visible".into(), v.view.clone(), "via".into()]);
        walk(r, &v.path, &mut toks);
    }
    let seps = [" ", "  ", "\n", "\t", " # note\n", "\n\n   "];
    let mut out = String::new();
    for t in toks {
        out.push_str(&t);
        out.push_str(seps.choose(r).unwrap());
    }
    out
}
