use super::ast::{Binding, CmpOp, Condition, Expr, Loc, Rule, RuleSet, Target, Visibility};
use crate::context::{Direction, PathExpression, PathStep};
use crate::syntax::{is_ident, Cursor, LexOptions, ParseError, Tok};
use crate::value::Value;

/// Parses a `.cvt` rule file.
pub fn parse_rules(text: &str) -> Result<RuleSet, ParseError> {
    let mut cur = Cursor::new(text, LexOptions::default())?;
    let mut rs = RuleSet::default();
    while !cur.at_eof() {
        if cur.is_keyword("rule") {
            let rule = parse_rule(&mut cur)?;
            if rs.rule(&rule.name).is_some() {
                return Err(ParseError::at(rule.loc.0, format!("duplicate rule name `{}`", rule.name)));
            }
            rs.rules.push(rule);
        } else if cur.is_keyword("visible") {
            let loc = Loc(cur.bump().pos);
            let (view, _) = cur.expect_ident("a view id")?;
            cur.expect_keyword("via")?;
            let path = parse_walk(&mut cur)?;
            rs.visibility.push(Visibility { view, path, loc });
        } else {
            return Err(cur.unexpected("`rule` or `visible`"));
        }
    }
    Ok(rs)
}

fn parse_rule(cur: &mut Cursor) -> Result<Rule, ParseError> {
    cur.expect_keyword("rule")?;
    let (name, name_pos) = cur.expect_ident("a rule name")?;
    cur.expect_punct("{")?;
    cur.expect_keyword("from")?;
    let (source_type, _) = cur.expect_ident("a source type")?;

    let mut guard = Vec::new();
    if cur.eat_keyword("where") {
        loop {
            guard.push(parse_condition(cur)?);
            if !cur.eat_keyword("and") {
                break;
            }
        }
    }

    cur.expect_keyword("to")?;
    let (target_word, tpos) = cur.expect_word("a target `<view>.<Concept>`")?;
    let target = match target_word.split_once('.') {
        Some((v, c)) if is_ident(v) && is_ident(c) => Target { view: v.to_string(), concept: c.to_string() },
        _ => return Err(ParseError::at(tpos, format!("expected a target `<view>.<Concept>`, found `{target_word}`"))),
    };

    cur.expect_punct("{")?;
    let mut bindings: Vec<Binding> = Vec::new();
    while !cur.is_punct("}") {
        let (field, fpos) = cur.expect_ident("a field name or `}`")?;
        if bindings.iter().any(|b| b.field == field) {
            return Err(ParseError::at(fpos, format!("field `{field}` is bound twice")));
        }
        cur.expect_punct(":=")?;
        let expr = parse_expr(cur)?;
        bindings.push(Binding { field, expr, loc: Loc(fpos) });
        if !cur.eat_punct(",") {
            break;
        }
    }
    cur.expect_punct("}")?;
    cur.expect_punct("}")?;
    Ok(Rule { name, source_type, guard, target, bindings, loc: Loc(name_pos) })
}

fn src_attr(word: &str) -> Option<&str> {
    word.strip_prefix("src.").filter(|a| is_ident(a))
}

fn parse_condition(cur: &mut Cursor) -> Result<Condition, ParseError> {
    let pos = cur.pos();
    if cur.eat_keyword("role") {
        cur.expect_punct("=")?;
        let (role, _) = cur.expect_ident("a role name")?;
        return Ok(Condition::Role { role, loc: Loc(pos) });
    }
    let (word, _) = cur.expect_word("`src.<attr>` or `role`")?;
    let attr = src_attr(&word)
        .ok_or_else(|| ParseError::at(pos, format!("expected `src.<attr>` or `role`, found `{word}`")))?
        .to_string();
    let op_pos = cur.pos();
    let op = match &cur.peek().tok {
        Tok::Punct(p) => CmpOp::from_symbol(p),
        _ => None,
    }
    .ok_or_else(|| ParseError::at(op_pos, format!("expected a comparison operator, found {}", cur.peek().tok)))?;
    cur.bump();
    let value = parse_literal(cur)?;
    Ok(Condition::Compare { attr, op, value, loc: Loc(pos) })
}

fn parse_literal(cur: &mut Cursor) -> Result<Value, ParseError> {
    let pos = cur.pos();
    match &cur.peek().tok {
        Tok::Word(w) if w.contains('.') => Err(ParseError::at(pos, format!("expected a literal, found `{w}`"))),
        Tok::Word(_) | Tok::Str(_) => Value::parse(cur),
        _ => Err(cur.unexpected("a literal")),
    }
}

fn parse_expr(cur: &mut Cursor) -> Result<Expr, ParseError> {
    let pos = cur.pos();
    if cur.is_keyword("first") && matches!(cur.peek_nth(1).tok, Tok::Punct("(")) {
        cur.bump();
        cur.expect_punct("(")?;
        let path = parse_walk(cur)?;
        cur.expect_punct(")")?;
        cur.expect_punct(".")?;
        let (attr, _) = cur.expect_ident("an attribute name")?;
        return Ok(Expr::PathAttr { path, attr });
    }
    if let Tok::Word(w) = &cur.peek().tok {
        if w == "src" || w.starts_with("src.") {
            let attr = src_attr(w)
                .ok_or_else(|| ParseError::at(pos, format!("expected `src.<attr>`, found `{w}`")))?
                .to_string();
            cur.bump();
            return Ok(Expr::Attr(attr));
        }
    }
    parse_literal(cur).map(Expr::Literal)
}

/// `walk(<rel>[.fwd|.bwd] / ...)`
fn parse_walk(cur: &mut Cursor) -> Result<PathExpression, ParseError> {
    cur.expect_keyword("walk")?;
    cur.expect_punct("(")?;
    let mut steps = Vec::new();
    loop {
        let (word, pos) = cur.expect_word("a path step `<relation>[.fwd|.bwd]`")?;
        let (rel, dir) = match word.split_once('.') {
            None => (word.as_str(), Direction::Forward),
            Some((r, "fwd")) => (r, Direction::Forward),
            Some((r, "bwd")) => (r, Direction::Backward),
            Some((_, other)) => {
                return Err(ParseError::at(pos, format!("unknown step direction `{other}` (expected fwd or bwd)")))
            }
        };
        if !is_ident(rel) {
            return Err(ParseError::at(pos, format!("invalid relation name `{rel}`")));
        }
        steps.push(PathStep::new(rel, dir));
        if !cur.eat_punct("/") {
            break;
        }
    }
    cur.expect_punct(")")?;
    Ok(PathExpression::new(steps).expect("at least one step was parsed"))
}
