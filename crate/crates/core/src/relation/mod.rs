//! In-memory tables: typed cells, CSV ingestion and row predicates.
//!
//! A [`Relation`] is immutable once built. Every edit goes through
//! [`Relation::update`], which returns a new snapshot with a new fingerprint,
//! so dependency sets bound to the old snapshot can detect staleness.

mod csv;
mod predicate;
mod rowset;
mod value;

use std::collections::HashSet;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub use self::csv::{load_csv, CsvOptions};
pub use self::predicate::{eval_row_predicate, BoundPredicate, CmpOp, RowPredicate};
pub use self::rowset::RowSet;
pub use self::value::{Kind, Value};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttributeMeta {
    pub name: String,
    pub index: usize,
    pub kind: Kind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    name: String,
    schema: Vec<AttributeMeta>,
    rows: Vec<Vec<Value>>,
    fingerprint: u64,
}

impl Relation {
    /// Builds a relation from `(name, kind)` columns and rows of matching
    /// arity. Cells must be null or of their column's kind.
    pub fn new(
        name: impl Into<String>,
        columns: Vec<(String, Kind)>,
        rows: Vec<Vec<Value>>,
    ) -> Result<Self> {
        let mut seen = HashSet::new();
        for (col, _) in &columns {
            if !seen.insert(col.as_str()) {
                return Err(Error::Schema(format!("duplicate attribute name \"{col}\"")));
            }
        }
        let schema: Vec<AttributeMeta> = columns
            .into_iter()
            .enumerate()
            .map(|(index, (name, kind))| AttributeMeta { name, index, kind })
            .collect();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != schema.len() {
                return Err(Error::Schema(format!(
                    "row {} has {} values, schema has {}",
                    i + 1,
                    row.len(),
                    schema.len()
                )));
            }
            for (cell, attr) in row.iter().zip(&schema) {
                if let Some(k) = cell.kind() {
                    if k != attr.kind {
                        return Err(Error::Type(format!(
                            "row {}: {k} value in {} attribute \"{}\"",
                            i + 1,
                            attr.kind,
                            attr.name
                        )));
                    }
                }
            }
        }
        Ok(Self::from_parts(name.into(), schema, rows))
    }

    fn from_parts(name: String, schema: Vec<AttributeMeta>, rows: Vec<Vec<Value>>) -> Self {
        let fingerprint = fingerprint(&schema, &rows);
        Relation {
            name,
            schema,
            rows,
            fingerprint,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn schema(&self) -> &[AttributeMeta] {
        &self.schema
    }

    pub fn attribute_names(&self) -> Vec<String> {
        self.schema.iter().map(|a| a.name.clone()).collect()
    }

    pub fn arity(&self) -> usize {
        self.schema.len()
    }

    /// Number of rows.
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> &[Vec<Value>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &[Value] {
        &self.rows[i]
    }

    pub fn value(&self, row: usize, attr: usize) -> &Value {
        &self.rows[row][attr]
    }

    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    pub fn attr_index(&self, name: &str) -> Result<usize> {
        self.schema
            .iter()
            .position(|a| a.name == name)
            .ok_or_else(|| Error::UnknownAttribute(name.to_owned()))
    }

    pub fn attr_name(&self, index: usize) -> &str {
        &self.schema[index].name
    }

    pub fn attr_indices<S: AsRef<str>>(&self, names: &[S]) -> Result<Vec<usize>> {
        names.iter().map(|n| self.attr_index(n.as_ref())).collect()
    }

    /// Same data under another name.
    pub fn renamed(&self, name: impl Into<String>) -> Relation {
        Relation {
            name: name.into(),
            ..self.clone()
        }
    }

    /// Sub-relation made of the given rows, renumbered from 0 in order.
    pub fn select_rows(&self, rows: &RowSet) -> Relation {
        let picked = rows.iter().map(|r| self.rows[r].clone()).collect();
        Self::from_parts(self.name.clone(), self.schema.clone(), picked)
    }

    /// New snapshot with `attr` set to `value` on `rows`. The literal is
    /// coerced to the column kind; integer into decimal and numbers into text
    /// are allowed, the reverse directions are type errors.
    pub fn update(&self, attr: &str, value: &Value, rows: &RowSet) -> Result<Relation> {
        let idx = self.attr_index(attr)?;
        let kind = self.schema[idx].kind;
        let cell = value.coerce_to(kind).ok_or_else(|| {
            Error::Type(format!(
                "cannot store {value} in {kind} attribute \"{attr}\""
            ))
        })?;
        let mut data = self.rows.clone();
        for r in rows.iter() {
            data[r][idx] = cell.clone();
        }
        Ok(Self::from_parts(
            self.name.clone(),
            self.schema.clone(),
            data,
        ))
    }
}

fn fingerprint(schema: &[AttributeMeta], rows: &[Vec<Value>]) -> u64 {
    let mut h = Sha256::new();
    h.update((schema.len() as u64).to_le_bytes());
    for a in schema {
        h.update((a.name.len() as u64).to_le_bytes());
        h.update(a.name.as_bytes());
        h.update([a.kind as u8]);
    }
    h.update((rows.len() as u64).to_le_bytes());
    for row in rows {
        for cell in row {
            match cell {
                Value::Null => h.update([0u8]),
                Value::Integer(i) => {
                    h.update([1u8]);
                    h.update(i.to_le_bytes());
                }
                Value::Decimal(d) => {
                    let s = d.to_string();
                    h.update([2u8]);
                    h.update((s.len() as u64).to_le_bytes());
                    h.update(s.as_bytes());
                }
                Value::Text(s) => {
                    h.update([3u8]);
                    h.update((s.len() as u64).to_le_bytes());
                    h.update(s.as_bytes());
                }
            }
        }
    }
    let digest = h.finalize();
    u64::from_be_bytes(digest[..8].try_into().expect("sha256 digest is 32 bytes"))
}
