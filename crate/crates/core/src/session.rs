//! Statement dispatch for the command line front end: named tables and FD
//! sets, output settings, and rendering of every statement's result.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use chrono::{DateTime, SecondsFormat, Utc};

use crate::error::{Error, Pos, Result};
use crate::fdstore::{
    attr_closure, check_imported, diff_fdsets, eval_fdml, is_implied, parse_fdml, read_fdset,
    write_fdset, FdEntry, FdSet, FdmlProjection, Origin,
};
use crate::miner::{mine_fds, parse_minefd, with_threads};
use crate::query::{execute, explain, row_or, select};
use crate::relation::{eval_row_predicate, load_csv, CsvOptions, Relation, RowPredicate, Value};
use crate::syntax::{Cursor, Sym};
use crate::table::{Cell, OutputMode, ResultTable};

pub const HELP: &str = "\
Statements (end each with `;` in scripts):
  LOAD '<path>' AS <table> [NULL '<token>']
  MINEFD <fdset> AS SELECT LHS -> RHS [, ERROR] [WHERE <conditions>] FROM <table> [ERROR <real>]
  SELECTDEP [* | LHS -> RHS] FROM <fdset> [WHERE <condition>]
  SELECT <* | attributes | DEPENDENT ([attributes] [, ERROR = <real>])> FROM <table> [WHERE <condition>]
  EXPLAIN SELECT ...
  UPDATE <table> SET <attribute> = <literal> [WHERE <condition>]
  DIFF <fdset> <fdset>
  EXPORT <fdset> TO '<path>'
  IMPORT '<path>' AS <fdset>
  CLOSURE <attributes> IN <fdset>
  IMPLIED <attributes> -> <attribute> IN <fdset>
  SHOW TABLES | SHOW FDSETS
Commands:
  \\help                         this text
  \\output table|csv|records     result format
  \\null <token>                 text shown for null cells
  \\quit                         leave the session
";

/// Rendered result of one statement.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Response {
    pub text: String,
    pub quit: bool,
}

impl Response {
    fn text(text: impl Into<String>) -> Self {
        Response {
            text: text.into(),
            quit: false,
        }
    }
}

/// One statement of a script, with where it starts.
#[derive(Debug, Clone, PartialEq)]
pub struct Statement {
    pub text: String,
    pub start: Pos,
}

pub struct Session {
    relations: BTreeMap<String, Relation>,
    fdsets: BTreeMap<String, FdSet>,
    pub output: OutputMode,
    pub null_token: String,
    /// Worker threads for mining; `None` uses the global pool.
    pub threads: Option<usize>,
    /// Base directory for relative paths.
    pub data_dir: Option<PathBuf>,
    clock: Box<dyn Fn() -> String + Send>,
}

impl Default for Session {
    fn default() -> Self {
        Session::new()
    }
}

/// `SOURCE_DATE_EPOCH` when set, else the current time, as RFC 3339 UTC.
pub fn default_timestamp() -> String {
    let now = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.trim().parse::<i64>().ok())
        .and_then(|secs| DateTime::<Utc>::from_timestamp(secs, 0))
        .unwrap_or_else(Utc::now);
    now.to_rfc3339_opts(SecondsFormat::Secs, true)
}

impl Session {
    pub fn new() -> Self {
        Session {
            relations: BTreeMap::new(),
            fdsets: BTreeMap::new(),
            output: OutputMode::Table,
            null_token: String::new(),
            threads: None,
            data_dir: None,
            clock: Box::new(default_timestamp),
        }
    }

    /// Replaces the source of FD set timestamps.
    pub fn with_clock(mut self, clock: impl Fn() -> String + Send + 'static) -> Self {
        self.clock = Box::new(clock);
        self
    }

    pub fn relation(&self, name: &str) -> Option<&Relation> {
        self.relations.get(name)
    }

    pub fn fdset(&self, name: &str) -> Option<&FdSet> {
        self.fdsets.get(name)
    }

    pub fn add_relation(&mut self, relation: Relation) {
        self.relations.insert(relation.name().to_string(), relation);
    }

    fn table(&self, name: &str) -> Result<&Relation> {
        self.relations
            .get(name)
            .ok_or_else(|| Error::UnknownObject(name.to_string()))
    }

    fn set(&self, name: &str) -> Result<&FdSet> {
        self.fdsets
            .get(name)
            .ok_or_else(|| Error::UnknownObject(name.to_string()))
    }

    fn resolve(&self, path: &str) -> PathBuf {
        let p = Path::new(path);
        match &self.data_dir {
            Some(dir) if p.is_relative() => dir.join(p),
            _ => p.to_path_buf(),
        }
    }

    fn render(&self, t: &ResultTable) -> String {
        t.render(self.output, &self.null_token)
    }

    fn stale_warning(&self, fs: &FdSet) -> Option<String> {
        match self.relations.get(&fs.table) {
            Some(r) if fs.is_stale(r) => Some(format!(
                "warning: FD set \"{}\" was built on an earlier snapshot of {}\n",
                fs.name, fs.table
            )),
            _ => None,
        }
    }

    /// Runs one statement. Syntax error positions are relative to `line`.
    pub fn run_command(&mut self, line: &str) -> Result<Response> {
        let trimmed = line.trim();
        if let Some(meta) = trimmed.strip_prefix('\\') {
            return self.meta(meta);
        }
        let cur = Cursor::new(line)?;
        if cur.at_end() {
            return Ok(Response::default());
        }
        let head = [
            "LOAD",
            "MINEFD",
            "SELECTDEP",
            "SELECT",
            "EXPLAIN",
            "UPDATE",
            "DIFF",
        ]
        .into_iter()
        .chain(["EXPORT", "IMPORT", "CLOSURE", "IMPLIED", "SHOW"])
        .find(|k| cur.is_kw(k));
        match head {
            Some("LOAD") => self.load(cur),
            Some("MINEFD") => self.mine(line),
            Some("SELECTDEP") => self.select_dep(line),
            Some("SELECT") => self.select(cur),
            Some("EXPLAIN") => self.explain(cur),
            Some("UPDATE") => self.update(cur),
            Some("DIFF") => self.diff(cur),
            Some("EXPORT") => self.export(cur),
            Some("IMPORT") => self.import(cur),
            Some("CLOSURE") => self.closure(cur),
            Some("IMPLIED") => self.implied(cur),
            Some("SHOW") => self.show(cur),
            _ => cur.unexpected("a statement keyword"),
        }
    }

    fn meta(&mut self, cmd: &str) -> Result<Response> {
        let mut parts = cmd.split_whitespace();
        let name = parts.next().unwrap_or("");
        let arg = parts.next();
        match (name, arg) {
            ("quit" | "q", None) => Ok(Response {
                text: String::new(),
                quit: true,
            }),
            ("help" | "h" | "?", None) => Ok(Response::text(HELP)),
            ("output", Some(mode)) => {
                self.output = mode.parse()?;
                Ok(Response::text(format!("output mode {}\n", self.output)))
            }
            ("output", None) => Ok(Response::text(format!("output mode {}\n", self.output))),
            ("null", token) => {
                self.null_token = token.unwrap_or("").to_string();
                Ok(Response::default())
            }
            _ => Err(Error::Parameter(format!(
                "unknown command `\\{cmd}` (try \\help)"
            ))),
        }
    }

    fn load(&mut self, mut cur: Cursor) -> Result<Response> {
        cur.expect_kw("LOAD")?;
        let path = cur.string()?;
        cur.expect_kw("AS")?;
        let name = cur.name()?;
        let null = if cur.eat_kw("NULL") {
            cur.string()?
        } else {
            self.null_token.clone()
        };
        cur.expect_end()?;
        let file = File::open(self.resolve(&path)).map_err(|e| {
            Error::Io(std::io::Error::new(
                e.kind(),
                format!("cannot open '{path}': {e}"),
            ))
        })?;
        let mut opts = CsvOptions::named(&name);
        opts.null_token = null;
        let rel = load_csv(BufReader::new(file), &opts)?;
        let text = format!(
            "loaded {name}: {} rows, {} attributes\n",
            rel.len(),
            rel.arity()
        );
        self.relations.insert(name, rel);
        Ok(Response::text(text))
    }

    fn mine(&mut self, line: &str) -> Result<Response> {
        let stmt = parse_minefd(line)?;
        let spec = stmt.to_spec()?;
        let rel = self.table(&stmt.table)?;
        let mined = match self.threads {
            Some(n) => with_threads(n, || mine_fds(rel, &spec))??,
            None => mine_fds(rel, &spec)?,
        };
        let fs = FdSet::for_relation(&stmt.target, rel, (self.clock)(), mined.entries)?;
        let mut text = String::new();
        for w in &mined.warnings {
            text.push_str(&format!("warning: {w}\n"));
        }
        text.push_str(&self.render(&fd_table(fs.entries(), stmt.show_error)));
        self.fdsets.insert(stmt.target, fs);
        Ok(Response::text(text))
    }

    fn select_dep(&self, line: &str) -> Result<Response> {
        let q = parse_fdml(line)?;
        let fs = self.set(&q.source)?;
        let mut text = self.stale_warning(fs).unwrap_or_default();
        let entries = eval_fdml(&q, fs);
        let table = match q.projection {
            FdmlProjection::Star => {
                let mut t =
                    ResultTable::new(["lhs", "rhs", "error", "origin"].map(String::from).to_vec());
                t.rows = entries
                    .iter()
                    .map(|e| {
                        vec![
                            Cell::text(e.lhs.join(", ")),
                            Cell::text(e.rhs.clone()),
                            Cell::Real(e.error),
                            Cell::text(e.origin.to_string()),
                        ]
                    })
                    .collect();
                t
            }
            FdmlProjection::LhsRhs => fd_table(&entries, false),
        };
        text.push_str(&self.render(&table));
        Ok(Response::text(text))
    }

    fn select(&self, mut cur: Cursor) -> Result<Response> {
        let q = select(&mut cur)?;
        cur.expect_end()?;
        let rel = self.table(&q.source)?;
        let result = execute(&q, rel)?;
        let mut text = String::new();
        if let Some(dep) = &result.dependent {
            text.push_str(&format!("dependent: {}\n", dep.join(", ")));
        }
        text.push_str(&self.render(&result.table));
        Ok(Response::text(text))
    }

    fn explain(&self, mut cur: Cursor) -> Result<Response> {
        cur.expect_kw("EXPLAIN")?;
        let q = select(&mut cur)?;
        cur.expect_end()?;
        self.table(&q.source)?;
        let mut text = explain(&q).join("\n");
        text.push('\n');
        Ok(Response::text(text))
    }

    fn update(&mut self, mut cur: Cursor) -> Result<Response> {
        cur.expect_kw("UPDATE")?;
        let name = cur.name()?;
        cur.expect_kw("SET")?;
        let attr = cur.attribute()?;
        cur.expect_sym(Sym::Eq)?;
        let value = if cur.is_kw("NULL") {
            cur.advance();
            Value::Null
        } else {
            cur.literal()?
        };
        let cond = if cur.eat_kw("WHERE") {
            row_or(&mut cur)?
        } else {
            RowPredicate::always()
        };
        cur.expect_end()?;
        let rel = self.table(&name)?;
        let rows = eval_row_predicate(rel, &cond)?;
        let updated = rel.update(&attr, &value, &rows)?;
        self.relations.insert(name.clone(), updated);
        let mut text = format!(
            "updated {} row{} of {name}\n",
            rows.len(),
            if rows.len() == 1 { "" } else { "s" }
        );
        for fs in self.fdsets.values() {
            if let Some(w) = self.stale_warning(fs) {
                text.push_str(&w);
            }
        }
        Ok(Response::text(text))
    }

    fn diff(&self, mut cur: Cursor) -> Result<Response> {
        cur.expect_kw("DIFF")?;
        let a = cur.name()?;
        cur.eat_sym(Sym::Comma);
        let b = cur.name()?;
        cur.expect_end()?;
        let d = diff_fdsets(self.set(&a)?, self.set(&b)?)?;
        let mut t = ResultTable::new(
            ["change", "lhs", "rhs", "old_error", "new_error"]
                .map(String::from)
                .to_vec(),
        );
        let row = |c: &str, e: &FdEntry, old: Option<f64>, new: Option<f64>| {
            let real = |x: Option<f64>| x.map_or(Cell::Value(Value::Null), Cell::Real);
            vec![
                Cell::text(c),
                Cell::text(e.lhs.join(", ")),
                Cell::text(e.rhs.clone()),
                real(old),
                real(new),
            ]
        };
        for e in &d.removed {
            t.rows.push(row("-", e, Some(e.error), None));
        }
        for e in &d.added {
            t.rows.push(row("+", e, None, Some(e.error)));
        }
        for (o, n) in &d.error_changed {
            t.rows.push(row("~", n, Some(o.error), Some(n.error)));
        }
        Ok(Response::text(self.render(&t)))
    }

    fn export(&self, mut cur: Cursor) -> Result<Response> {
        cur.expect_kw("EXPORT")?;
        let name = cur.name()?;
        cur.expect_kw("TO")?;
        let path = cur.string()?;
        cur.expect_end()?;
        let fs = self.set(&name)?;
        let file = File::create(self.resolve(&path)).map_err(|e| {
            Error::Io(std::io::Error::new(
                e.kind(),
                format!("cannot create '{path}': {e}"),
            ))
        })?;
        write_fdset(fs, std::io::BufWriter::new(file))?;
        Ok(Response::text(format!(
            "exported {name}: {} dependencies\n",
            fs.len()
        )))
    }

    fn import(&mut self, mut cur: Cursor) -> Result<Response> {
        cur.expect_kw("IMPORT")?;
        let path = cur.string()?;
        cur.expect_kw("AS")?;
        let name = cur.name()?;
        cur.expect_end()?;
        let file = File::open(self.resolve(&path)).map_err(|e| {
            Error::Io(std::io::Error::new(
                e.kind(),
                format!("cannot open '{path}': {e}"),
            ))
        })?;
        let read = read_fdset(BufReader::new(file))?;
        let entries = read
            .entries()
            .iter()
            .map(|e| FdEntry {
                origin: Origin::Imported,
                ..e.clone()
            })
            .collect();
        let fs = FdSet::new(
            &name,
            &read.table,
            read.fingerprint,
            read.attributes.clone(),
            &read.mined_at,
            entries,
        )?;
        let mut text = format!("imported {name}: {} dependencies\n", fs.len());
        for f in check_imported(&fs) {
            text.push_str(&format!("warning: {f}\n"));
        }
        if let Some(w) = self.stale_warning(&fs) {
            text.push_str(&w);
        }
        self.fdsets.insert(name, fs);
        Ok(Response::text(text))
    }

    fn closure(&self, mut cur: Cursor) -> Result<Response> {
        cur.expect_kw("CLOSURE")?;
        let attrs = attribute_list(&mut cur)?;
        cur.expect_kw("IN")?;
        let fs = self.set(&cur.name()?)?;
        cur.expect_end()?;
        let closure = attr_closure(&attrs, fs)?;
        let ordered: Vec<&str> = fs
            .attributes
            .iter()
            .filter(|a| closure.contains(*a))
            .map(String::as_str)
            .collect();
        Ok(Response::text(format!("{}\n", ordered.join(", "))))
    }

    fn implied(&self, mut cur: Cursor) -> Result<Response> {
        cur.expect_kw("IMPLIED")?;
        let lhs = attribute_list(&mut cur)?;
        cur.expect_sym(Sym::Arrow)?;
        let rhs = cur.attribute()?;
        cur.expect_kw("IN")?;
        let fs = self.set(&cur.name()?)?;
        cur.expect_end()?;
        let fd = FdEntry::new(lhs, rhs, 0.0, Origin::Imported)?;
        Ok(Response::text(format!("{}\n", is_implied(&fd, fs)?)))
    }

    fn show(&self, mut cur: Cursor) -> Result<Response> {
        cur.expect_kw("SHOW")?;
        let t = if cur.eat_kw("TABLES") {
            let mut t =
                ResultTable::new(["table", "rows", "attributes"].map(String::from).to_vec());
            t.rows = self
                .relations
                .values()
                .map(|r| {
                    vec![
                        Cell::text(r.name()),
                        Cell::Value(Value::Integer(r.len() as i64)),
                        Cell::Value(Value::Integer(r.arity() as i64)),
                    ]
                })
                .collect();
            t
        } else if cur.eat_kw("FDSETS") {
            let mut t = ResultTable::new(
                ["fdset", "table", "dependencies", "mined_at", "stale"]
                    .map(String::from)
                    .to_vec(),
            );
            t.rows = self
                .fdsets
                .values()
                .map(|fs| {
                    vec![
                        Cell::text(fs.name.clone()),
                        Cell::text(fs.table.clone()),
                        Cell::Value(Value::Integer(fs.len() as i64)),
                        Cell::text(fs.mined_at.clone()),
                        Cell::text(if self.stale_warning(fs).is_some() {
                            "yes"
                        } else {
                            "no"
                        }),
                    ]
                })
                .collect();
            t
        } else {
            return cur.unexpected("TABLES or FDSETS");
        };
        cur.expect_end()?;
        Ok(Response::text(self.render(&t)))
    }
}

fn attribute_list(cur: &mut Cursor) -> Result<Vec<String>> {
    let mut out = vec![cur.attribute()?];
    while cur.eat_sym(Sym::Comma) {
        out.push(cur.attribute()?);
    }
    Ok(out)
}

/// `lhs | rhs` with an error column when asked for or when any entry is
/// approximate.
pub fn fd_table(entries: &[FdEntry], show_error: bool) -> ResultTable {
    let with_error = show_error || entries.iter().any(|e| !e.is_exact());
    let mut cols = vec!["lhs".to_string(), "rhs".to_string()];
    if with_error {
        cols.push("error".into());
    }
    let mut t = ResultTable::new(cols);
    t.rows = entries
        .iter()
        .map(|e| {
            let mut r = vec![Cell::text(e.lhs.join(", ")), Cell::text(e.rhs.clone())];
            if with_error {
                r.push(Cell::Real(e.error));
            }
            r
        })
        .collect();
    t
}

/// Splits a script into statements at `;` outside quotes. Lines starting
/// with `\` are commands of their own; `--` starts a comment.
pub fn split_statements(src: &str) -> Vec<Statement> {
    let mut out = Vec::new();
    let mut text = String::new();
    let mut start: Option<Pos> = None;
    let mut quote: Option<char> = None;
    let (mut line, mut col) = (1usize, 1usize);
    let mut chars = src.chars().peekable();
    let mut at_line_start = true;
    while let Some(c) = chars.next() {
        let here = Pos { line, column: col };
        if c == '\n' {
            line += 1;
            col = 1;
        } else {
            col += 1;
        }
        if quote.is_none() && start.is_none() && at_line_start && c == '\\' {
            let mut cmd = String::from('\\');
            while let Some(&n) = chars.peek() {
                if n == '\n' {
                    break;
                }
                cmd.push(n);
                chars.next();
                col += 1;
            }
            out.push(Statement {
                text: cmd.trim_end().to_string(),
                start: here,
            });
            continue;
        }
        if c == '\n' {
            at_line_start = true;
        } else if !c.is_whitespace() {
            at_line_start = false;
        }
        match quote {
            Some(q) => {
                if c == q {
                    quote = None;
                }
                text.push(c);
            }
            None if c == '-' && chars.peek() == Some(&'-') => {
                while let Some(&n) = chars.peek() {
                    if n == '\n' {
                        break;
                    }
                    chars.next();
                    col += 1;
                }
                if start.is_some() {
                    text.push(' ');
                }
            }
            None if c == ';' => {
                if let Some(s) = start.take() {
                    out.push(Statement {
                        text: std::mem::take(&mut text),
                        start: s,
                    });
                }
            }
            None => {
                if start.is_none() {
                    if c.is_whitespace() {
                        continue;
                    }
                    start = Some(here);
                }
                if c == '\'' || c == '"' {
                    quote = Some(c);
                }
                text.push(c);
            }
        }
    }
    if let Some(s) = start {
        if !text.trim().is_empty() {
            out.push(Statement { text, start: s });
        }
    }
    out
}

/// True when `buffer` ends with a `;` outside quotes and comments, or is a
/// single `\` command.
pub fn ends_statement(buffer: &str) -> bool {
    let t = buffer.trim();
    if t.starts_with('\\') && !t.contains('\n') {
        return true;
    }
    let mut quote: Option<char> = None;
    let mut last = None;
    let mut chars = t.chars().peekable();
    while let Some(c) = chars.next() {
        match quote {
            Some(q) if c == q => quote = None,
            Some(_) => {}
            None if c == '-' && chars.peek() == Some(&'-') => {
                while chars.peek().is_some_and(|&n| n != '\n') {
                    chars.next();
                }
            }
            None => {
                if c == '\'' || c == '"' {
                    quote = Some(c);
                }
                if !c.is_whitespace() {
                    last = Some(c);
                }
            }
        }
    }
    quote.is_none() && last == Some(';')
}

/// Moves a syntax error position from statement-relative to script-relative.
pub fn relocate(err: Error, start: Pos) -> Error {
    match err {
        Error::Syntax { pos, message } => Error::Syntax {
            pos: Pos {
                line: pos.line + start.line - 1,
                column: if pos.line == 1 {
                    pos.column + start.column - 1
                } else {
                    pos.column
                },
            },
            message,
        },
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splitting_keeps_positions() {
        let s = split_statements("LOAD 'a;b' AS t; -- note\n  SELECT *\n FROM t;\n\\quit\n");
        assert_eq!(s.len(), 3);
        assert_eq!(s[0].text, "LOAD 'a;b' AS t");
        assert_eq!(s[1].start, Pos { line: 2, column: 3 });
        assert_eq!(s[1].text, "SELECT *\n FROM t");
        assert_eq!(s[2].text, "\\quit");
    }

    #[test]
    fn statement_ends() {
        assert!(ends_statement("SELECT * FROM t;"));
        assert!(ends_statement("SELECT * FROM t; -- done"));
        assert!(!ends_statement("SELECT * FROM t WHERE a = 'x;"));
        assert!(!ends_statement("SELECT *\n FROM t"));
        assert!(ends_statement("\\quit"));
    }

    #[test]
    fn relocation() {
        let e = relocate(
            Error::syntax(Pos { line: 1, column: 5 }, "x"),
            Pos { line: 3, column: 4 },
        );
        assert!(matches!(
            e,
            Error::Syntax {
                pos: Pos { line: 3, column: 8 },
                ..
            }
        ));
        let e = relocate(
            Error::syntax(Pos { line: 2, column: 5 }, "x"),
            Pos { line: 3, column: 4 },
        );
        assert!(matches!(
            e,
            Error::Syntax {
                pos: Pos { line: 4, column: 5 },
                ..
            }
        ));
    }

    #[test]
    fn meta_commands() {
        let mut s = Session::new();
        assert!(s.run_command("\\quit").unwrap().quit);
        s.run_command("\\output csv").unwrap();
        assert_eq!(s.output, OutputMode::Csv);
        assert!(s.run_command("\\bogus").is_err());
        assert!(matches!(s.run_command("FROB x"), Err(Error::Syntax { .. })));
        assert!(matches!(
            s.run_command("SELECT * FROM nowhere"),
            Err(Error::UnknownObject(_))
        ));
    }
}
