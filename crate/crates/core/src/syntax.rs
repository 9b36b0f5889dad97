//! Tokenizer and parsing cursor shared by the FDML, MINEFD, extended SELECT
//! and session statement grammars.
//!
//! Keywords are not distinguished at lexing time: they arrive as `Ident`
//! tokens and the parsers match them case-insensitively. Double-quoted tokens
//! are attribute names (or string literals where a literal is expected);
//! single-quoted tokens are always string literals.

use std::fmt;

use rust_decimal::Decimal;

use crate::error::{Error, Pos, Result};
use crate::relation::{CmpOp, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sym {
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Comma,
    Semicolon,
    Star,
    Plus,
    Minus,
    Arrow,
    Eq,
    Ne,
    Lt,
    Gt,
    Le,
    Ge,
}

impl Sym {
    fn text(self) -> &'static str {
        match self {
            Sym::LParen => "(",
            Sym::RParen => ")",
            Sym::LBrace => "{",
            Sym::RBrace => "}",
            Sym::LBracket => "[",
            Sym::RBracket => "]",
            Sym::Comma => ",",
            Sym::Semicolon => ";",
            Sym::Star => "*",
            Sym::Plus => "+",
            Sym::Minus => "-",
            Sym::Arrow => "->",
            Sym::Eq => "=",
            Sym::Ne => "<>",
            Sym::Lt => "<",
            Sym::Gt => ">",
            Sym::Le => "<=",
            Sym::Ge => ">=",
        }
    }

    pub fn cmp_op(self) -> Option<CmpOp> {
        Some(match self {
            Sym::Eq => CmpOp::Eq,
            Sym::Ne => CmpOp::Ne,
            Sym::Lt => CmpOp::Lt,
            Sym::Gt => CmpOp::Gt,
            Sym::Le => CmpOp::Le,
            Sym::Ge => CmpOp::Ge,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Ident(String),
    /// `"..."`, quotes doubled inside.
    Quoted(String),
    /// `'...'`, quotes doubled inside.
    Str(String),
    Number(String),
    Sym(Sym),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Quoted(s) => write!(f, "\"{s}\""),
            Tok::Str(s) => write!(f, "'{s}'"),
            Tok::Number(s) => write!(f, "{s}"),
            Tok::Sym(s) => write!(f, "`{}`", s.text()),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
    /// Byte offset of the token start in the source.
    pub offset: usize,
}

pub fn tokenize(src: &str) -> Result<Vec<Token>> {
    Lexer::new(src).run()
}

struct Lexer<'a> {
    src: &'a str,
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    line: usize,
    column: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src,
            chars: src.char_indices().peekable(),
            line: 1,
            column: 1,
        }
    }

    fn bump(&mut self) -> Option<(usize, char)> {
        let next = self.chars.next();
        if let Some((_, c)) = next {
            if c == '\n' {
                self.line += 1;
                self.column = 1;
            } else {
                self.column += 1;
            }
        }
        next
    }

    fn peek_char(&mut self) -> Option<char> {
        self.chars.peek().map(|&(_, c)| c)
    }

    fn pos(&self) -> Pos {
        Pos {
            line: self.line,
            column: self.column,
        }
    }

    fn run(mut self) -> Result<Vec<Token>> {
        let mut out = Vec::new();
        loop {
            while self.peek_char().is_some_and(char::is_whitespace) {
                self.bump();
            }
            // `--` line comments
            if self.src[self.offset()..].starts_with("--") {
                while self.peek_char().is_some_and(|c| c != '\n') {
                    self.bump();
                }
                continue;
            }
            let pos = self.pos();
            let offset = self.offset();
            let Some((_, c)) = self.bump() else {
                out.push(Token {
                    tok: Tok::Eof,
                    pos,
                    offset,
                });
                return Ok(out);
            };
            let tok = match c {
                '"' | '\'' => {
                    let body = self.quoted(c, pos)?;
                    if c == '"' {
                        Tok::Quoted(body)
                    } else {
                        Tok::Str(body)
                    }
                }
                c if c.is_ascii_digit() => Tok::Number(self.number(offset)),
                c if c.is_alphabetic() || c == '_' => {
                    while self
                        .peek_char()
                        .is_some_and(|c| c.is_alphanumeric() || c == '_')
                    {
                        self.bump();
                    }
                    Tok::Ident(self.src[offset..self.offset()].to_owned())
                }
                _ => Tok::Sym(self.symbol(c, pos)?),
            };
            out.push(Token { tok, pos, offset });
        }
    }

    fn offset(&mut self) -> usize {
        self.chars.peek().map_or(self.src.len(), |&(i, _)| i)
    }

    fn quoted(&mut self, quote: char, start: Pos) -> Result<String> {
        let mut body = String::new();
        loop {
            match self.bump() {
                None => return Err(Error::syntax(start, "unterminated quoted token")),
                Some((_, c)) if c == quote => {
                    if self.peek_char() == Some(quote) {
                        self.bump();
                        body.push(quote);
                    } else {
                        return Ok(body);
                    }
                }
                Some((_, c)) => body.push(c),
            }
        }
    }

    fn number(&mut self, start: usize) -> String {
        while self.peek_char().is_some_and(|c| c.is_ascii_digit()) {
            self.bump();
        }
        let rest = &self.src[self.offset()..];
        let mut frac = rest.chars();
        if frac.next() == Some('.') && frac.next().is_some_and(|c| c.is_ascii_digit()) {
            self.bump();
            while self.peek_char().is_some_and(|c| c.is_ascii_digit()) {
                self.bump();
            }
        }
        self.src[start..self.offset()].to_owned()
    }

    fn symbol(&mut self, c: char, pos: Pos) -> Result<Sym> {
        let next = self.peek_char();
        let two = |lexer: &mut Self, sym| {
            lexer.bump();
            Ok(sym)
        };
        match (c, next) {
            ('-', Some('>')) => two(self, Sym::Arrow),
            ('<', Some('=')) => two(self, Sym::Le),
            ('>', Some('=')) => two(self, Sym::Ge),
            ('<', Some('>')) => two(self, Sym::Ne),
            ('!', Some('=')) => two(self, Sym::Ne),
            ('(', _) => Ok(Sym::LParen),
            (')', _) => Ok(Sym::RParen),
            ('{', _) => Ok(Sym::LBrace),
            ('}', _) => Ok(Sym::RBrace),
            ('[', _) => Ok(Sym::LBracket),
            (']', _) => Ok(Sym::RBracket),
            (',', _) => Ok(Sym::Comma),
            (';', _) => Ok(Sym::Semicolon),
            ('*', _) => Ok(Sym::Star),
            ('+', _) => Ok(Sym::Plus),
            ('-' | '\u{2212}', _) => Ok(Sym::Minus),
            ('\u{2192}', _) => Ok(Sym::Arrow),
            ('=', _) => Ok(Sym::Eq),
            ('<', _) => Ok(Sym::Lt),
            ('>', _) => Ok(Sym::Gt),
            ('\u{2260}', _) => Ok(Sym::Ne),
            ('\u{2264}', _) => Ok(Sym::Le),
            ('\u{2265}', _) => Ok(Sym::Ge),
            _ => Err(Error::syntax(pos, format!("unexpected character `{c}`"))),
        }
    }
}

/// Words that never act as bare attribute names.
const RESERVED: &[&str] = &[
    "SELECT",
    "SELECTDEP",
    "MINEFD",
    "FROM",
    "WHERE",
    "AND",
    "OR",
    "NOT",
    "HOLDS",
    "VIOLATES",
    "DEPENDENT",
    "ON",
    "ERROR",
    "LIKE",
    "LENGTH",
    "LHS",
    "RHS",
    "AS",
    "TRUE",
    "FALSE",
];

pub fn is_reserved(word: &str) -> bool {
    RESERVED.iter().any(|k| k.eq_ignore_ascii_case(word))
}

/// Forward-only view over a token stream.
pub struct Cursor {
    tokens: Vec<Token>,
    at: usize,
}

impl Cursor {
    pub fn new(src: &str) -> Result<Self> {
        Ok(Cursor {
            tokens: tokenize(src)?,
            at: 0,
        })
    }

    pub fn peek(&self) -> &Token {
        &self.tokens[self.at.min(self.tokens.len() - 1)]
    }

    pub fn peek_nth(&self, n: usize) -> &Tok {
        &self.tokens[(self.at + n).min(self.tokens.len() - 1)].tok
    }

    pub fn pos(&self) -> Pos {
        self.peek().pos
    }

    pub fn advance(&mut self) -> Token {
        let t = self.peek().clone();
        if self.at < self.tokens.len() - 1 {
            self.at += 1;
        }
        t
    }

    pub fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::syntax(self.pos(), message))
    }

    pub fn unexpected<T>(&self, wanted: &str) -> Result<T> {
        self.error(format!("expected {wanted}, found {}", self.peek().tok))
    }

    pub fn is_kw(&self, kw: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(s) if s.eq_ignore_ascii_case(kw))
    }

    pub fn is_kw_at(&self, n: usize, kw: &str) -> bool {
        matches!(self.peek_nth(n), Tok::Ident(s) if s.eq_ignore_ascii_case(kw))
    }

    pub fn eat_kw(&mut self, kw: &str) -> bool {
        if self.is_kw(kw) {
            self.advance();
            true
        } else {
            false
        }
    }

    pub fn expect_kw(&mut self, kw: &str) -> Result<()> {
        if self.eat_kw(kw) {
            Ok(())
        } else {
            self.unexpected(kw)
        }
    }

    pub fn is_sym(&self, sym: Sym) -> bool {
        self.peek().tok == Tok::Sym(sym)
    }

    pub fn eat_sym(&mut self, sym: Sym) -> bool {
        if self.is_sym(sym) {
            self.advance();
            true
        } else {
            false
        }
    }

    pub fn expect_sym(&mut self, sym: Sym) -> Result<()> {
        if self.eat_sym(sym) {
            Ok(())
        } else {
            self.unexpected(&format!("`{}`", sym.text()))
        }
    }

    pub fn at_end(&self) -> bool {
        matches!(self.peek().tok, Tok::Eof | Tok::Sym(Sym::Semicolon))
    }

    /// Accepts end of input, optionally after one trailing `;`.
    pub fn expect_end(&mut self) -> Result<()> {
        self.eat_sym(Sym::Semicolon);
        if self.peek().tok == Tok::Eof {
            Ok(())
        } else {
            self.unexpected("end of statement")
        }
    }

    pub fn comparison(&mut self) -> Option<CmpOp> {
        match self.peek().tok {
            Tok::Sym(s) => {
                let op = s.cmp_op()?;
                self.advance();
                Some(op)
            }
            _ => None,
        }
    }

    pub fn expect_comparison(&mut self) -> Result<CmpOp> {
        match self.comparison() {
            Some(op) => Ok(op),
            None => self.unexpected("comparison operator"),
        }
    }

    /// Plain identifier (object names such as tables and FD sets).
    pub fn name(&mut self) -> Result<String> {
        match &self.peek().tok {
            Tok::Ident(s) | Tok::Quoted(s) => {
                let s = s.clone();
                self.advance();
                Ok(s)
            }
            _ => self.unexpected("name"),
        }
    }

    /// Attribute reference: double-quoted, or a bare non-reserved word.
    pub fn attribute(&mut self) -> Result<String> {
        match &self.peek().tok {
            Tok::Quoted(s) => {
                let s = s.clone();
                self.advance();
                Ok(s)
            }
            Tok::Ident(s) if !is_reserved(s) => {
                let s = s.clone();
                self.advance();
                Ok(s)
            }
            _ => self.unexpected("attribute name"),
        }
    }

    pub fn is_attribute(&self) -> bool {
        match &self.peek().tok {
            Tok::Quoted(_) => true,
            Tok::Ident(s) => !is_reserved(s),
            _ => false,
        }
    }

    /// Single- or double-quoted string.
    pub fn string(&mut self) -> Result<String> {
        match &self.peek().tok {
            Tok::Quoted(s) | Tok::Str(s) => {
                let s = s.clone();
                self.advance();
                Ok(s)
            }
            _ => self.unexpected("quoted string"),
        }
    }

    /// Numeric or string constant.
    pub fn literal(&mut self) -> Result<Value> {
        let negative = self.eat_sym(Sym::Minus);
        match &self.peek().tok {
            Tok::Number(n) => {
                let text = if negative { format!("-{n}") } else { n.clone() };
                let v = if text.contains('.') {
                    text.parse::<Decimal>().map(Value::decimal).ok()
                } else {
                    text.parse::<i64>().ok().map(Value::Integer)
                };
                match v {
                    Some(v) => {
                        self.advance();
                        Ok(v)
                    }
                    None => self.error(format!("numeric literal {text} out of range")),
                }
            }
            Tok::Str(_) | Tok::Quoted(_) if !negative => Ok(Value::Text(self.string()?)),
            _ => self.unexpected("literal"),
        }
    }

    pub fn real(&mut self) -> Result<f64> {
        match &self.peek().tok {
            Tok::Number(n) => {
                let v = n.parse::<f64>().expect("lexer numbers are valid floats");
                self.advance();
                Ok(v)
            }
            _ => self.unexpected("number"),
        }
    }

    pub fn uint(&mut self) -> Result<usize> {
        match &self.peek().tok {
            Tok::Number(n) if !n.contains('.') => match n.parse() {
                Ok(v) => {
                    self.advance();
                    Ok(v)
                }
                Err(_) => self.error(format!("integer {n} out of range")),
            },
            _ => self.unexpected("unsigned integer"),
        }
    }
}

pub fn quote_ident(name: &str) -> String {
    format!("\"{}\"", name.replace('"', "\"\""))
}

pub fn quote_str(s: &str) -> String {
    format!("'{}'", s.replace('\'', "''"))
}

pub fn quote_literal(v: &Value) -> String {
    match v {
        Value::Text(s) => quote_str(s),
        other => other.to_string(),
    }
}

/// Formats an `f64` so that parsing the text yields the same value.
pub fn fmt_real(x: f64) -> String {
    let s = format!("{x}");
    if s.contains('.') || s.contains("inf") || s.contains("NaN") {
        s
    } else {
        format!("{s}.0")
    }
}
