//! Attribute-set patterns used by FDML `LIKE` clauses and MINEFD filters.
//!
//! Both expression kinds evaluate to a list of *alternatives*: attribute sets
//! of which an FD's side must reach one. A glob list `{"Address",
//! "Category*"}` expands to one alternative per distinct choice of a match for
//! every pattern; `+` concatenates alternative lists; `-` removes attributes.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::Result;
use crate::syntax::{quote_ident, Cursor, Sym, Tok};

pub type AttrNames = BTreeSet<String>;

/// `*` matches any run of characters (including none); everything else is
/// literal.
pub fn glob_match(pattern: &str, name: &str) -> bool {
    let p: Vec<char> = pattern.chars().collect();
    let s: Vec<char> = name.chars().collect();
    let (mut pi, mut si) = (0, 0);
    let mut backtrack: Option<(usize, usize)> = None;
    while si < s.len() {
        if pi < p.len() && p[pi] == '*' {
            backtrack = Some((pi, si));
            pi += 1;
        } else if pi < p.len() && p[pi] == s[si] {
            pi += 1;
            si += 1;
        } else if let Some((bp, bs)) = backtrack {
            pi = bp + 1;
            si = bs + 1;
            backtrack = Some((bp, bs + 1));
        } else {
            return false;
        }
    }
    p[pi..].iter().all(|&c| c == '*')
}

pub fn is_literal_pattern(pattern: &str) -> bool {
    !pattern.contains('*')
}

fn matches_of<'a>(pattern: &str, schema: &'a [String]) -> Vec<&'a String> {
    schema.iter().filter(|a| glob_match(pattern, a)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub enum SubsetExpr {
    Globs(Vec<String>),
    Star,
    Union(Box<SubsetExpr>, Box<SubsetExpr>),
    Diff(Box<SubsetExpr>, Box<SubsetExpr>),
}

impl SubsetExpr {
    pub fn globs<S: Into<String>>(patterns: impl IntoIterator<Item = S>) -> Self {
        SubsetExpr::Globs(patterns.into_iter().map(Into::into).collect())
    }

    pub fn union(a: SubsetExpr, b: SubsetExpr) -> Self {
        SubsetExpr::Union(Box::new(a), Box::new(b))
    }

    pub fn diff(a: SubsetExpr, b: SubsetExpr) -> Self {
        SubsetExpr::Diff(Box::new(a), Box::new(b))
    }

    /// Every glob pattern in the expression.
    pub fn patterns(&self) -> Vec<&str> {
        match self {
            SubsetExpr::Globs(p) => p.iter().map(String::as_str).collect(),
            SubsetExpr::Star => Vec::new(),
            SubsetExpr::Union(a, b) | SubsetExpr::Diff(a, b) => {
                let mut v = a.patterns();
                v.extend(b.patterns());
                v
            }
        }
    }

    /// Attributes any part of the expression can name.
    pub fn matched(&self, schema: &[String]) -> AttrNames {
        match self {
            SubsetExpr::Globs(p) => p
                .iter()
                .flat_map(|pat| matches_of(pat, schema))
                .cloned()
                .collect(),
            SubsetExpr::Star => schema.iter().cloned().collect(),
            SubsetExpr::Union(a, b) => {
                let mut m = a.matched(schema);
                m.extend(b.matched(schema));
                m
            }
            SubsetExpr::Diff(a, b) => {
                let right = b.matched(schema);
                a.matched(schema).difference(&right).cloned().collect()
            }
        }
    }

    pub fn alternatives(&self, schema: &[String]) -> Vec<AttrNames> {
        self.alternatives_excluding(schema, &AttrNames::new())
    }

    fn alternatives_excluding(&self, schema: &[String], excluded: &AttrNames) -> Vec<AttrNames> {
        match self {
            SubsetExpr::Globs(patterns) => expand_globs(patterns, schema, excluded),
            SubsetExpr::Star => vec![schema
                .iter()
                .filter(|a| !excluded.contains(*a))
                .cloned()
                .collect()],
            SubsetExpr::Union(a, b) => {
                let mut alts = a.alternatives_excluding(schema, excluded);
                alts.extend(b.alternatives_excluding(schema, excluded));
                alts
            }
            SubsetExpr::Diff(a, b) => {
                let mut more = excluded.clone();
                more.extend(b.matched(schema));
                a.alternatives_excluding(schema, &more)
            }
        }
    }
}

/// Cartesian expansion: each alternative picks one distinct, non-excluded
/// match per pattern. A pattern whose every match is excluded drops out of
/// the product; a pattern with no match at all empties it.
fn expand_globs(patterns: &[String], schema: &[String], excluded: &AttrNames) -> Vec<AttrNames> {
    let mut choices: Vec<Vec<&String>> = Vec::with_capacity(patterns.len());
    for pat in patterns {
        let all = matches_of(pat, schema);
        if all.is_empty() {
            return Vec::new();
        }
        let kept: Vec<&String> = all.into_iter().filter(|a| !excluded.contains(*a)).collect();
        if !kept.is_empty() {
            choices.push(kept);
        }
    }

    let mut out: Vec<AttrNames> = Vec::new();
    let mut picked: Vec<&String> = Vec::new();
    fn walk<'a>(
        choices: &[Vec<&'a String>],
        picked: &mut Vec<&'a String>,
        out: &mut Vec<AttrNames>,
    ) {
        let Some((first, rest)) = choices.split_first() else {
            let alt: AttrNames = picked.iter().map(|s| (*s).clone()).collect();
            if !out.contains(&alt) {
                out.push(alt);
            }
            return;
        };
        for &c in first {
            if picked.contains(&c) {
                continue;
            }
            picked.push(c);
            walk(rest, picked, out);
            picked.pop();
        }
    }
    walk(&choices, &mut picked, &mut out);
    out
}

pub fn eval_subset_expr(expr: &SubsetExpr, schema: &[String]) -> Vec<AttrNames> {
    expr.alternatives(schema)
}

/// Left-side construct of FDML's `LHS LIKE`.
#[derive(Debug, Clone, PartialEq)]
pub enum LhsConstruct {
    /// Bare glob list, with the Cartesian alternative semantics.
    Globs(Vec<String>),
    /// `[AND S]`: every attribute `S` matches.
    AllOf(SubsetExpr),
    /// `[OR S]`: at least one attribute `S` matches.
    AnyOf(SubsetExpr),
    /// `*`: no requirement.
    Star,
    Union(Box<LhsConstruct>, Box<LhsConstruct>),
    Diff(Box<LhsConstruct>, Box<LhsConstruct>),
}

impl LhsConstruct {
    pub fn globs<S: Into<String>>(patterns: impl IntoIterator<Item = S>) -> Self {
        LhsConstruct::Globs(patterns.into_iter().map(Into::into).collect())
    }

    pub fn union(a: LhsConstruct, b: LhsConstruct) -> Self {
        LhsConstruct::Union(Box::new(a), Box::new(b))
    }

    pub fn diff(a: LhsConstruct, b: LhsConstruct) -> Self {
        LhsConstruct::Diff(Box::new(a), Box::new(b))
    }

    fn matched(&self, schema: &[String]) -> AttrNames {
        match self {
            LhsConstruct::Globs(p) => SubsetExpr::Globs(p.clone()).matched(schema),
            LhsConstruct::AllOf(s) | LhsConstruct::AnyOf(s) => s.matched(schema),
            LhsConstruct::Star => schema.iter().cloned().collect(),
            LhsConstruct::Union(a, b) => {
                let mut m = a.matched(schema);
                m.extend(b.matched(schema));
                m
            }
            LhsConstruct::Diff(a, b) => {
                let right = b.matched(schema);
                a.matched(schema).difference(&right).cloned().collect()
            }
        }
    }

    /// Required attribute sets; an LHS satisfies the construct when it
    /// contains at least one of them.
    pub fn alternatives(&self, schema: &[String]) -> Vec<AttrNames> {
        self.alternatives_excluding(schema, &AttrNames::new())
    }

    fn alternatives_excluding(&self, schema: &[String], excluded: &AttrNames) -> Vec<AttrNames> {
        let strip = |s: AttrNames| -> AttrNames { s.difference(excluded).cloned().collect() };
        match self {
            LhsConstruct::Globs(p) => expand_globs(p, schema, excluded),
            LhsConstruct::AllOf(s) => {
                let alts = s.alternatives(schema);
                if alts.is_empty() {
                    return Vec::new();
                }
                vec![strip(alts.into_iter().flatten().collect())]
            }
            LhsConstruct::AnyOf(s) => {
                let mut out: Vec<AttrNames> = Vec::new();
                for name in s.alternatives(schema).into_iter().flatten() {
                    if excluded.contains(&name) {
                        continue;
                    }
                    let single = AttrNames::from([name]);
                    if !out.contains(&single) {
                        out.push(single);
                    }
                }
                out
            }
            LhsConstruct::Star => vec![AttrNames::new()],
            LhsConstruct::Union(a, b) => {
                let mut alts = a.alternatives_excluding(schema, excluded);
                alts.extend(b.alternatives_excluding(schema, excluded));
                alts
            }
            LhsConstruct::Diff(a, b) => {
                let mut more = excluded.clone();
                more.extend(b.matched(schema));
                a.alternatives_excluding(schema, &more)
            }
        }
    }
}

fn write_globs(f: &mut fmt::Formatter<'_>, patterns: &[String]) -> fmt::Result {
    f.write_str("{")?;
    for (i, p) in patterns.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        f.write_str(&quote_ident(p))?;
    }
    f.write_str("}")
}

impl fmt::Display for SubsetExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubsetExpr::Globs(p) => write_globs(f, p),
            SubsetExpr::Star => f.write_str("*"),
            SubsetExpr::Union(a, b) => write!(f, "({a} + {b})"),
            SubsetExpr::Diff(a, b) => write!(f, "({a} - {b})"),
        }
    }
}

impl fmt::Display for LhsConstruct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LhsConstruct::Globs(p) => write_globs(f, p),
            LhsConstruct::AllOf(s) => write!(f, "[AND {s}]"),
            LhsConstruct::AnyOf(s) => write!(f, "[OR {s}]"),
            LhsConstruct::Star => f.write_str("*"),
            LhsConstruct::Union(a, b) => write!(f, "({a} + {b})"),
            LhsConstruct::Diff(a, b) => write!(f, "({a} - {b})"),
        }
    }
}

fn parse_string_list(cur: &mut Cursor, close: Sym) -> Result<Vec<String>> {
    let mut out = Vec::new();
    if cur.eat_sym(close) {
        return Ok(out);
    }
    loop {
        out.push(cur.string()?);
        if cur.eat_sym(close) {
            return Ok(out);
        }
        cur.expect_sym(Sym::Comma)?;
    }
}

fn starts_string_list(cur: &Cursor) -> bool {
    cur.is_sym(Sym::LParen) && matches!(cur.peek_nth(1), Tok::Quoted(_) | Tok::Str(_))
}

/// `subset := primary (('+' | '-') primary)*`
pub(crate) fn parse_subset(cur: &mut Cursor) -> Result<SubsetExpr> {
    let mut acc = parse_subset_primary(cur)?;
    loop {
        if cur.eat_sym(Sym::Plus) {
            acc = SubsetExpr::union(acc, parse_subset_primary(cur)?);
        } else if cur.eat_sym(Sym::Minus) {
            acc = SubsetExpr::diff(acc, parse_subset_primary(cur)?);
        } else {
            return Ok(acc);
        }
    }
}

fn parse_subset_primary(cur: &mut Cursor) -> Result<SubsetExpr> {
    if cur.eat_sym(Sym::LBrace) {
        return Ok(SubsetExpr::Globs(parse_string_list(cur, Sym::RBrace)?));
    }
    if cur.eat_sym(Sym::Star) {
        return Ok(SubsetExpr::Star);
    }
    if starts_string_list(cur) {
        cur.advance();
        return Ok(SubsetExpr::Globs(parse_string_list(cur, Sym::RParen)?));
    }
    if cur.eat_sym(Sym::LParen) {
        let inner = parse_subset(cur)?;
        cur.expect_sym(Sym::RParen)?;
        return Ok(inner);
    }
    cur.unexpected("attribute subset (`{...}`, `*` or `(...)`)")
}

pub(crate) fn parse_lhs_construct(cur: &mut Cursor) -> Result<LhsConstruct> {
    let mut acc = parse_lhs_primary(cur)?;
    loop {
        if cur.eat_sym(Sym::Plus) {
            acc = LhsConstruct::union(acc, parse_lhs_primary(cur)?);
        } else if cur.eat_sym(Sym::Minus) {
            acc = LhsConstruct::diff(acc, parse_lhs_primary(cur)?);
        } else {
            return Ok(acc);
        }
    }
}

fn parse_lhs_primary(cur: &mut Cursor) -> Result<LhsConstruct> {
    if cur.eat_sym(Sym::LBrace) {
        return Ok(LhsConstruct::Globs(parse_string_list(cur, Sym::RBrace)?));
    }
    if cur.eat_sym(Sym::Star) {
        return Ok(LhsConstruct::Star);
    }
    if cur.eat_sym(Sym::LBracket) {
        let all = if cur.eat_kw("AND") {
            true
        } else if cur.eat_kw("OR") {
            false
        } else {
            return cur.unexpected("AND or OR after `[`");
        };
        let s = parse_subset(cur)?;
        cur.expect_sym(Sym::RBracket)?;
        return Ok(if all {
            LhsConstruct::AllOf(s)
        } else {
            LhsConstruct::AnyOf(s)
        });
    }
    if starts_string_list(cur) {
        cur.advance();
        return Ok(LhsConstruct::Globs(parse_string_list(cur, Sym::RParen)?));
    }
    if cur.eat_sym(Sym::LParen) {
        let inner = parse_lhs_construct(cur)?;
        cur.expect_sym(Sym::RParen)?;
        return Ok(inner);
    }
    cur.unexpected("LHS construct (`{...}`, `[AND ...]`, `[OR ...]`, `*` or `(...)`)")
}
