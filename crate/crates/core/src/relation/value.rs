use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rust_decimal::Decimal;

/// Column kind inferred at load time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind {
    Integer,
    Decimal,
    Text,
}

impl Kind {
    pub fn is_numeric(self) -> bool {
        matches!(self, Kind::Integer | Kind::Decimal)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Integer => "integer",
            Kind::Decimal => "decimal",
            Kind::Text => "text",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A single cell.
///
/// Decimals are stored normalized (trailing fractional zeros stripped), so the
/// derived `Eq`/`Hash` give value equality: `1.50 == 1.5`. Integer and decimal
/// cells never share a column, so cross-variant equality is not needed for
/// partitioning; comparisons against literals go through [`Value::compare`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Value {
    Null,
    Integer(i64),
    Decimal(Decimal),
    Text(String),
}

impl Value {
    pub fn decimal(d: Decimal) -> Self {
        Value::Decimal(d.normalize())
    }

    pub fn text(s: impl Into<String>) -> Self {
        Value::Text(s.into())
    }

    pub fn is_null(&self) -> bool {
        matches!(self, Value::Null)
    }

    pub fn kind(&self) -> Option<Kind> {
        match self {
            Value::Null => None,
            Value::Integer(_) => Some(Kind::Integer),
            Value::Decimal(_) => Some(Kind::Decimal),
            Value::Text(_) => Some(Kind::Text),
        }
    }

    fn as_decimal(&self) -> Option<Decimal> {
        match self {
            Value::Integer(i) => Some(Decimal::from(*i)),
            Value::Decimal(d) => Some(*d),
            _ => None,
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Integer(i) => Some(*i as f64),
            Value::Decimal(d) => d.to_string().parse().ok(),
            _ => None,
        }
    }

    /// Ordering between two non-null values of comparable kinds; numbers
    /// compare numerically, text by byte order. `None` for nulls or mixed
    /// text/number operands.
    pub fn compare(&self, other: &Value) -> Option<Ordering> {
        match (self, other) {
            (Value::Integer(a), Value::Integer(b)) => Some(a.cmp(b)),
            (Value::Text(a), Value::Text(b)) => Some(a.as_bytes().cmp(b.as_bytes())),
            (a, b) => Some(a.as_decimal()?.cmp(&b.as_decimal()?)),
        }
    }

    /// Parse a cell under a known column kind. A cell that does not fit the
    /// kind is a type error for the caller to report.
    pub fn parse_as(kind: Kind, raw: &str) -> Option<Value> {
        match kind {
            Kind::Integer => parse_integer(raw).map(Value::Integer),
            Kind::Decimal => parse_decimal(raw).map(Value::decimal),
            Kind::Text => Some(Value::Text(raw.to_owned())),
        }
    }

    /// Coerce a literal to a column kind (used by `UPDATE ... SET`).
    pub fn coerce_to(&self, kind: Kind) -> Option<Value> {
        match (self, kind) {
            (Value::Null, _) => Some(Value::Null),
            (Value::Integer(_), Kind::Integer) | (Value::Decimal(_), Kind::Decimal) => {
                Some(self.clone())
            }
            (Value::Integer(i), Kind::Decimal) => Some(Value::decimal(Decimal::from(*i))),
            (Value::Text(_), Kind::Text) => Some(self.clone()),
            (Value::Integer(_) | Value::Decimal(_), Kind::Text) => {
                Some(Value::Text(self.to_string()))
            }
            _ => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Null => f.write_str("NULL"),
            Value::Integer(i) => write!(f, "{i}"),
            Value::Decimal(d) => write!(f, "{d}"),
            Value::Text(s) => f.write_str(s),
        }
    }
}

fn is_digits(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())
}

fn strip_sign(s: &str) -> &str {
    s.strip_prefix(['+', '-']).unwrap_or(s)
}

pub(crate) fn parse_integer(raw: &str) -> Option<i64> {
    if !is_digits(strip_sign(raw)) {
        return None;
    }
    raw.parse().ok()
}

/// Accepts `[+-]digits[.digits]`; anything else (exponents, underscores,
/// bare dots) is not a decimal.
pub(crate) fn parse_decimal(raw: &str) -> Option<Decimal> {
    let body = strip_sign(raw);
    let well_formed = match body.split_once('.') {
        Some((int, frac)) => is_digits(int) && is_digits(frac),
        None => is_digits(body),
    };
    if !well_formed {
        return None;
    }
    Decimal::from_str(raw).ok()
}
