//! Tabular results and their text renderings.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::relation::Value;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Value(Value),
    Real(f64),
}

impl Cell {
    pub fn text(s: impl Into<String>) -> Self {
        Cell::Value(Value::Text(s.into()))
    }

    fn render(&self, null: &str) -> String {
        match self {
            Cell::Value(Value::Null) => null.to_string(),
            Cell::Value(v) => v.to_string(),
            Cell::Real(x) => format_real(*x),
        }
    }

    fn is_numeric(&self) -> bool {
        matches!(
            self,
            Cell::Real(_) | Cell::Value(Value::Integer(_) | Value::Decimal(_))
        )
    }
}

/// Six decimals with trailing zeros removed.
pub fn format_real(x: f64) -> String {
    let s = format!("{x:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputMode {
    #[default]
    Table,
    Csv,
    Records,
}

impl FromStr for OutputMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "table" => Ok(OutputMode::Table),
            "csv" => Ok(OutputMode::Csv),
            "records" => Ok(OutputMode::Records),
            _ => Err(Error::Parameter(format!(
                "unknown output mode `{s}` (expected table, csv or records)"
            ))),
        }
    }
}

impl fmt::Display for OutputMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputMode::Table => "table",
            OutputMode::Csv => "csv",
            OutputMode::Records => "records",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResultTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// 0-based source row of each result row, shown 1-based as `#`.
    pub row_ids: Option<Vec<usize>>,
}

impl ResultTable {
    pub fn new(columns: Vec<String>) -> Self {
        ResultTable {
            columns,
            ..Default::default()
        }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    fn grid(&self, null: &str) -> (Vec<String>, Vec<Vec<String>>, Vec<bool>) {
        let mut header = Vec::new();
        let mut numeric = Vec::new();
        if self.row_ids.is_some() {
            header.push("#".to_string());
            numeric.push(true);
        }
        header.extend(self.columns.iter().cloned());
        for c in 0..self.columns.len() {
            numeric.push(
                !self.rows.is_empty()
                    && self
                        .rows
                        .iter()
                        .all(|r| r[c].is_numeric() || r[c] == Cell::Value(Value::Null)),
            );
        }
        let body = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let mut line = Vec::new();
                if let Some(ids) = &self.row_ids {
                    line.push((ids[i] + 1).to_string());
                }
                line.extend(r.iter().map(|c| c.render(null)));
                line
            })
            .collect();
        (header, body, numeric)
    }

    pub fn render(&self, mode: OutputMode, null: &str) -> String {
        match mode {
            OutputMode::Table => self.render_table(null),
            OutputMode::Csv => self.render_csv(null),
            OutputMode::Records => self.render_records(null),
        }
    }

    fn render_table(&self, null: &str) -> String {
        let (header, body, numeric) = self.grid(null);
        let width = |c: usize| {
            body.iter()
                .map(|r| r[c].chars().count())
                .chain([header[c].chars().count()])
                .max()
                .unwrap_or(0)
        };
        let widths: Vec<usize> = (0..header.len()).map(width).collect();
        let line = |cells: &[String], align: bool| {
            let parts: Vec<String> = cells
                .iter()
                .enumerate()
                .map(|(c, s)| {
                    if align && numeric[c] {
                        format!("{s:>w$}", w = widths[c])
                    } else {
                        format!("{s:<w$}", w = widths[c])
                    }
                })
                .collect();
            parts.join(" | ").trim_end().to_string()
        };
        let mut out = String::new();
        out.push_str(&line(&header, false));
        out.push('\n');
        let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
        out.push_str(&rule.join("-+-"));
        out.push('\n');
        for r in &body {
            out.push_str(&line(r, true));
            out.push('\n');
        }
        let n = body.len();
        out.push_str(&format!("({n} row{})\n", if n == 1 { "" } else { "s" }));
        out
    }

    fn render_csv(&self, null: &str) -> String {
        let (header, body, _) = self.grid(null);
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&header).expect("write to memory");
        for r in &body {
            w.write_record(r).expect("write to memory");
        }
        String::from_utf8(w.into_inner().expect("flush to memory")).expect("csv output is utf-8")
    }

    fn render_records(&self, null: &str) -> String {
        let (header, body, _) = self.grid(null);
        let mut out = String::new();
        for (i, r) in body.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            for (h, v) in header.iter().zip(r) {
                out.push_str(&format!("{h}: {v}\n"));
            }
        }
        if body.is_empty() {
            out.push_str("(0 rows)\n");
        }
        out
    }
}
