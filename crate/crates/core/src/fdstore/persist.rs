//! `.fdset` files: one JSON document per line. The first line is a header
//! naming the set and its table snapshot; each further line is one entry.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::{FdEntry, FdSet, Origin};
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
struct Header {
    fdset: String,
    table: String,
    #[serde(default)]
    fingerprint: Option<String>,
    #[serde(default)]
    mined_at: Option<String>,
    #[serde(default)]
    attributes: Option<Vec<String>>,
}

#[derive(Serialize)]
struct EntryOut<'a> {
    lhs: &'a [String],
    rhs: &'a str,
    error: f64,
    origin: Origin,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum AttrRef {
    Name(String),
    Index(usize),
}

#[derive(Deserialize)]
struct EntryIn {
    lhs: Vec<AttrRef>,
    rhs: AttrRef,
    #[serde(default)]
    error: f64,
    #[serde(default)]
    origin: Option<Origin>,
}

pub fn write_fdset<W: Write>(fs: &FdSet, mut out: W) -> Result<()> {
    let header = Header {
        fdset: fs.name.clone(),
        table: fs.table.clone(),
        fingerprint: Some(format!("{:016x}", fs.fingerprint)),
        mined_at: Some(fs.mined_at.clone()),
        attributes: Some(fs.attributes.clone()),
    };
    writeln!(out, "{}", json_line(&header))?;
    for e in fs.entries() {
        let rec = EntryOut {
            lhs: &e.lhs,
            rhs: &e.rhs,
            error: e.error,
            origin: e.origin,
        };
        writeln!(out, "{}", json_line(&rec))?;
    }
    out.flush()?;
    Ok(())
}

fn json_line<T: Serialize>(record: &T) -> String {
    serde_json::to_string(record).expect("plain records always serialize")
}

/// Parses an `.fdset` stream. Entries keep the origin recorded in the file
/// (mined when absent). Left-side items may be names or 0-based indices into
/// the header's attribute list.
pub fn read_fdset<R: BufRead>(input: R) -> Result<FdSet> {
    let mut lines = input
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !matches!(l, Ok(s) if s.trim().is_empty()));

    let (hline, htext) = match lines.next() {
        Some((n, l)) => (n, l?),
        None => {
            return Err(Error::Format {
                line: 1,
                message: "missing header record".into(),
            })
        }
    };
    let header: Header = serde_json::from_str(&htext).map_err(|e| Error::Format {
        line: hline,
        message: format!("bad header: {e}"),
    })?;
    let fingerprint = match &header.fingerprint {
        None => 0,
        Some(hex) => u64::from_str_radix(hex, 16).map_err(|_| Error::Format {
            line: hline,
            message: format!("fingerprint {hex:?} is not 16 hex digits"),
        })?,
    };

    let mut raw = Vec::new();
    for (n, line) in lines {
        let text = line?;
        let rec: EntryIn = serde_json::from_str(&text).map_err(|e| Error::Format {
            line: n,
            message: e.to_string(),
        })?;
        raw.push((n, rec));
    }

    let attributes = match header.attributes {
        Some(a) => a,
        None => {
            let mut names: Vec<String> = Vec::new();
            for (n, rec) in &raw {
                for r in rec.lhs.iter().chain([&rec.rhs]) {
                    match r {
                        AttrRef::Name(s) if !names.contains(s) => names.push(s.clone()),
                        AttrRef::Name(_) => {}
                        AttrRef::Index(_) => {
                            return Err(Error::Format {
                                line: *n,
                                message: "index references need an attributes header".into(),
                            })
                        }
                    }
                }
            }
            names.sort();
            names
        }
    };

    let resolve = |r: &AttrRef, line: usize| -> Result<String> {
        match r {
            AttrRef::Name(s) => Ok(s.clone()),
            AttrRef::Index(i) => attributes.get(*i).cloned().ok_or_else(|| Error::Format {
                line,
                message: format!("attribute index {i} out of range"),
            }),
        }
    };
    let mut entries = Vec::with_capacity(raw.len());
    for (n, rec) in &raw {
        let lhs = rec
            .lhs
            .iter()
            .map(|r| resolve(r, *n))
            .collect::<Result<Vec<_>>>()?;
        let rhs = resolve(&rec.rhs, *n)?;
        let origin = rec.origin.unwrap_or(Origin::Mined);
        entries.push(
            FdEntry::new(lhs, rhs, rec.error, origin).map_err(|e| Error::Format {
                line: *n,
                message: e.to_string(),
            })?,
        );
    }

    FdSet::new(
        header.fdset,
        header.table,
        fingerprint,
        attributes,
        header.mined_at.unwrap_or_default(),
        entries,
    )
    .map_err(|e| Error::Format {
        line: hline,
        message: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> FdSet {
        FdSet::new(
            "fs",
            "IOWA",
            0xdead_beef_0123_4567,
            vec!["A".into(), "B".into(), "C".into()],
            "2024-01-01T00:00:00Z",
            vec![
                FdEntry::exact(["A"], "B"),
                FdEntry::new(["A", "B"], "C", 4.0 / 90.0, Origin::Imported).unwrap(),
            ],
        )
        .unwrap()
    }

    #[test]
    fn round_trip() {
        let mut buf = Vec::new();
        write_fdset(&sample(), &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(
            text.starts_with(r#"{"fdset":"fs","table":"IOWA","fingerprint":"deadbeef01234567""#)
        );
        assert_eq!(text.lines().count(), 3);
        assert_eq!(read_fdset(&buf[..]).unwrap(), sample());
    }

    #[test]
    fn index_references_and_defaults() {
        let src = concat!(
            r#"{"fdset":"x","table":"t","attributes":["a","b","c"]}"#,
            "\n\n",
            r#"{"lhs":[0,"c"],"rhs":1}"#,
            "\n"
        );
        let fs = read_fdset(src.as_bytes()).unwrap();
        assert_eq!(fs.entries()[0].lhs, ["a", "c"]);
        assert_eq!(fs.entries()[0].rhs, "b");
        assert_eq!(fs.entries()[0].origin, Origin::Mined);
    }

    #[test]
    fn malformed_lines_report_position() {
        let src = "{\"fdset\":\"x\",\"table\":\"t\"}\n{\"lhs\":[\"a\"]}\n";
        assert!(matches!(
            read_fdset(src.as_bytes()),
            Err(Error::Format { line: 2, .. })
        ));
        let src = "{\"fdset\":\"x\",\"table\":\"t\"}\n{\"lhs\":[\"a\"],\"rhs\":\"a\"}\n";
        assert!(matches!(
            read_fdset(src.as_bytes()),
            Err(Error::Format { line: 2, .. })
        ));
        assert!(matches!(
            read_fdset(&b""[..]),
            Err(Error::Format { line: 1, .. })
        ));
    }
}
