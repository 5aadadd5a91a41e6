//! Shared tokenizer and cursor for the line-oriented text formats
//! (`.cdm`, `.cpj`, `.cvt`, `.cvm`/`.cvs`, content documents and deltas).

use std::fmt;

use thiserror::Error;

/// A 1-based line/column location in a source text. Columns count chars.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Position {
    pub line: u32,
    pub column: u32,
}

impl Position {
    pub fn new(line: u32, column: u32) -> Self {
        Position { line, column }
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

/// A syntax or declaration error with its source location.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: u32,
    pub column: u32,
    pub message: String,
}

impl ParseError {
    pub fn at(pos: Position, message: impl Into<String>) -> Self {
        ParseError { line: pos.line, column: pos.column, message: message.into() }
    }

    pub fn position(&self) -> Position {
        Position::new(self.line, self.column)
    }
}

/// A located message, rendered as `line:col: message`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Diagnostic {
    pub pos: Position,
    pub message: String,
}

impl Diagnostic {
    pub fn new(pos: Position, message: impl Into<String>) -> Self {
        Diagnostic { pos, message: message.into() }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.pos, self.message)
    }
}

impl From<ParseError> for Diagnostic {
    fn from(e: ParseError) -> Self {
        Diagnostic::new(e.position(), e.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Word(String),
    Str(String),
    Punct(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Word(w) => write!(f, "`{w}`"),
            Tok::Str(s) => write!(f, "string {s:?}"),
            Tok::Punct(p) => write!(f, "`{p}`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub pos: Position,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct LexOptions {
    /// Accept `:` inside a word when it sits between two word characters
    /// (node ids such as `ouvrage:M1`).
    pub colon_in_words: bool,
}

const PUNCT2: [&str; 5] = ["->", ":=", "!=", "<=", ">="];
const PUNCT1: [&str; 14] = ["{", "}", "(", ")", "[", "]", ",", ":", "=", ";", "/", "<", ">", "|"];

fn is_word_start(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

pub fn tokenize(src: &str, opts: LexOptions) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1u32, 1u32);

    while i < chars.len() {
        let c = chars[i];
        let pos = Position::new(line, col);
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c == '"' {
            let mut s = String::new();
            i += 1;
            col += 1;
            loop {
                let Some(&d) = chars.get(i) else {
                    return Err(ParseError::at(pos, "unterminated string literal"));
                };
                match d {
                    '"' => {
                        i += 1;
                        col += 1;
                        break;
                    }
                    '\n' => return Err(ParseError::at(pos, "unterminated string literal")),
                    '\\' => {
                        let esc = chars.get(i + 1).copied();
                        let decoded = match esc {
                            Some('"') => '"',
                            Some('\\') => '\\',
                            Some('n') => '\n',
                            Some('t') => '\t',
                            _ => return Err(ParseError::at(Position::new(line, col), "invalid escape sequence")),
                        };
                        s.push(decoded);
                        i += 2;
                        col += 2;
                    }
                    _ => {
                        s.push(d);
                        i += 1;
                        col += 1;
                    }
                }
            }
            out.push(Token { tok: Tok::Str(s), pos });
            continue;
        }
        let next = chars.get(i + 1).copied();
        if is_word_start(c) || (c == '-' && next.is_some_and(|n| n.is_ascii_digit())) {
            let start = i;
            i += 1;
            while let Some(&d) = chars.get(i) {
                let after = chars.get(i + 1).copied();
                let take = is_word_start(d)
                    || (d == '-' && after.is_some_and(|a| a != '>' && is_word_start(a)))
                    || (d == '.' && after.is_some_and(is_word_start))
                    || (d == ':' && opts.colon_in_words && after.is_some_and(is_word_start));
                if !take {
                    break;
                }
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            col += (i - start) as u32;
            out.push(Token { tok: Tok::Word(word), pos });
            continue;
        }
        if let Some(n) = next {
            let pair: String = [c, n].iter().collect();
            if let Some(p) = PUNCT2.iter().find(|p| **p == pair) {
                out.push(Token { tok: Tok::Punct(p), pos });
                i += 2;
                col += 2;
                continue;
            }
        }
        let single = c.to_string();
        if let Some(p) = PUNCT1.iter().find(|p| **p == single) {
            out.push(Token { tok: Tok::Punct(p), pos });
            i += 1;
            col += 1;
            continue;
        }
        if c == '.' {
            out.push(Token { tok: Tok::Punct("."), pos });
            i += 1;
            col += 1;
            continue;
        }
        return Err(ParseError::at(pos, format!("unexpected character {c:?}")));
    }
    out.push(Token { tok: Tok::Eof, pos: Position::new(line, col) });
    Ok(out)
}

/// Forward-only cursor over a token stream.
pub struct Cursor {
    toks: Vec<Token>,
    idx: usize,
}

impl Cursor {
    pub fn new(src: &str, opts: LexOptions) -> Result<Self, ParseError> {
        Ok(Cursor { toks: tokenize(src, opts)?, idx: 0 })
    }

    pub fn peek(&self) -> &Token {
        &self.toks[self.idx]
    }

    pub fn peek_nth(&self, n: usize) -> &Token {
        let i = (self.idx + n).min(self.toks.len() - 1);
        &self.toks[i]
    }

    pub fn pos(&self) -> Position {
        self.peek().pos
    }

    pub fn bump(&mut self) -> Token {
        let t = self.toks[self.idx].clone();
        if self.idx + 1 < self.toks.len() {
            self.idx += 1;
        }
        t
    }

    pub fn at_eof(&self) -> bool {
        self.peek().tok == Tok::Eof
    }

    pub fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek().tok, Tok::Punct(q) if q == p)
    }

    pub fn is_keyword(&self, kw: &str) -> bool {
        matches!(&self.peek().tok, Tok::Word(w) if w == kw)
    }

    pub fn eat_punct(&mut self, p: &str) -> bool {
        if self.is_punct(p) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn eat_keyword(&mut self, kw: &str) -> bool {
        if self.is_keyword(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn unexpected(&self, wanted: &str) -> ParseError {
        ParseError::at(self.pos(), format!("expected {wanted}, found {}", self.peek().tok))
    }

    pub fn expect_punct(&mut self, p: &str) -> Result<Position, ParseError> {
        let pos = self.pos();
        if self.eat_punct(p) {
            Ok(pos)
        } else {
            Err(self.unexpected(&format!("`{p}`")))
        }
    }

    pub fn expect_keyword(&mut self, kw: &str) -> Result<Position, ParseError> {
        let pos = self.pos();
        if self.eat_keyword(kw) {
            Ok(pos)
        } else {
            Err(self.unexpected(&format!("`{kw}`")))
        }
    }

    pub fn expect_word(&mut self, what: &str) -> Result<(String, Position), ParseError> {
        let pos = self.pos();
        match &self.peek().tok {
            Tok::Word(w) => {
                let w = w.clone();
                self.bump();
                Ok((w, pos))
            }
            _ => Err(self.unexpected(what)),
        }
    }

    /// A word that is a plain identifier (no `.`, `:` or `-`).
    pub fn expect_ident(&mut self, what: &str) -> Result<(String, Position), ParseError> {
        let pos = self.pos();
        match &self.peek().tok {
            Tok::Word(w) if is_ident(w) => {
                let w = w.clone();
                self.bump();
                Ok((w, pos))
            }
            _ => Err(self.unexpected(what)),
        }
    }
}

pub fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_alphabetic() || c == '_') && chars.all(|c| c.is_alphanumeric() || c == '_')
}

/// Quotes a string using the escapes the tokenizer understands.
pub fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            _ => out.push(c),
        }
    }
    out.push('"');
    out
}
