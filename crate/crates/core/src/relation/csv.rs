use std::io::Read;

use super::value::{parse_decimal, parse_integer};
use super::{Kind, Relation, Value};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct CsvOptions {
    pub has_header: bool,
    /// Cells equal to this token load as null.
    pub null_token: String,
    pub name: String,
}

impl CsvOptions {
    pub fn named(name: impl Into<String>) -> Self {
        CsvOptions {
            has_header: true,
            null_token: String::new(),
            name: name.into(),
        }
    }
}

/// Reads comma-separated, double-quoted CSV (LF or CRLF) and infers a kind per
/// column: integer if every non-null cell is an integer, else decimal if every
/// one is a decimal, else text.
pub fn load_csv<R: Read>(source: R, options: &CsvOptions) -> Result<Relation> {
    let mut reader = ::csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(source);

    let mut records = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| Error::Ingest {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        records.push((line, rec));
    }

    let mut records = records.into_iter();
    let (header, first_data) = if options.has_header {
        let (_, h) = records
            .next()
            .ok_or_else(|| Error::Schema("empty source: no header record".into()))?;
        (h.iter().map(str::to_owned).collect::<Vec<_>>(), None)
    } else {
        let (line, first) = records
            .next()
            .ok_or_else(|| Error::Schema("empty source: no records".into()))?;
        let names = (0..first.len()).map(|i| format!("col{i}")).collect();
        (names, Some((line, first)))
    };

    let arity = header.len();
    let mut raw: Vec<Vec<Option<String>>> = Vec::new();
    for (line, rec) in first_data.into_iter().chain(records) {
        if rec.len() != arity {
            return Err(Error::Ingest {
                line,
                message: format!("record has {} fields, expected {arity}", rec.len()),
            });
        }
        raw.push(
            rec.iter()
                .map(|c| (c != options.null_token).then(|| c.to_owned()))
                .collect(),
        );
    }

    let kinds: Vec<Kind> = (0..arity).map(|c| infer_kind(&raw, c)).collect();
    let rows = raw
        .into_iter()
        .map(|cells| {
            cells
                .into_iter()
                .zip(&kinds)
                .map(|(cell, &kind)| match cell {
                    None => Value::Null,
                    Some(s) => Value::parse_as(kind, &s).expect("kind inferred from these cells"),
                })
                .collect()
        })
        .collect();

    Relation::new(
        options.name.clone(),
        header.into_iter().zip(kinds).collect(),
        rows,
    )
}

fn infer_kind(rows: &[Vec<Option<String>>], col: usize) -> Kind {
    let mut cells = rows.iter().filter_map(|r| r[col].as_deref()).peekable();
    if cells.peek().is_none() {
        return Kind::Text;
    }
    let mut kind = Kind::Integer;
    for cell in cells {
        if kind == Kind::Integer && parse_integer(cell).is_none() {
            kind = Kind::Decimal;
        }
        if kind == Kind::Decimal && parse_decimal(cell).is_none() {
            return Kind::Text;
        }
    }
    kind
}
