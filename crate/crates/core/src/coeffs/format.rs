//! The on-disk coefficient file format.
//!
//! UTF-8 text. Header lines begin with `#` and carry whitespace-separated
//! `key=value` pairs; required keys are `label`, `level`, `weight`,
//! `kind` (ap | an) and `bound`, plus an optional `sha256` checksum over
//! the record section. Records follow, one per line, as
//! `<index> <value>` in strictly increasing index order. Values are
//! decimal with an optional leading `-` (U+2212 is accepted too).

use std::collections::BTreeMap;

use num_bigint::BigInt;
use sha2::{Digest, Sha256};

use super::{
    CoefficientTable, FormDescriptor, FullCoefficientTable, PrimeCoefficientTable, Source,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableKind {
    Ap,
    An,
}

impl TableKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            TableKind::Ap => "ap",
            TableKind::An => "an",
        }
    }

    pub fn parse(s: &str) -> Result<TableKind> {
        match s {
            "ap" => Ok(TableKind::Ap),
            "an" => Ok(TableKind::An),
            other => Err(Error::usage(format!("unknown table kind {other:?}"))),
        }
    }
}

fn parse_value(s: &str, line: usize) -> Result<BigInt> {
    let normalized = s.replace('\u{2212}', "-");
    normalized.parse::<BigInt>().map_err(|_| Error::Parse {
        line,
        msg: format!("invalid integer {s:?}"),
    })
}

/// Parse a coefficient file; the header's `kind` selects the table type.
pub fn parse_coefficient_file(content: &str) -> Result<CoefficientTable> {
    let mut header: BTreeMap<String, String> = BTreeMap::new();
    let mut records: Vec<(u64, BigInt)> = Vec::new();
    let mut record_bytes: Vec<u8> = Vec::new();

    for (idx, raw) in content.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim_end();
        if line.trim().is_empty() {
            continue;
        }
        if let Some(rest) = line.trim_start().strip_prefix('#') {
            for token in rest.split_whitespace() {
                let (key, value) = token.split_once('=').ok_or(Error::Parse {
                    line: line_no,
                    msg: format!("header token {token:?} is not key=value"),
                })?;
                header.insert(key.to_string(), value.to_string());
            }
            continue;
        }
        let mut parts = line.split_whitespace();
        let (index_str, value_str) = match (parts.next(), parts.next(), parts.next()) {
            (Some(i), Some(v), None) => (i, v),
            _ => {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("record {line:?} is not `<index> <value>`"),
                })
            }
        };
        let index: u64 = index_str.parse().map_err(|_| Error::Parse {
            line: line_no,
            msg: format!("invalid index {index_str:?}"),
        })?;
        if let Some((last, _)) = records.last() {
            if index <= *last {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("index {index} not strictly increasing after {last}"),
                });
            }
        }
        let value = parse_value(value_str, line_no)?;
        record_bytes.extend_from_slice(format!("{index} {value}\n").as_bytes());
        records.push((index, value));
    }

    let get = |key: &str| -> Result<&String> {
        header.get(key).ok_or_else(|| Error::Parse {
            line: 0,
            msg: format!("missing required header key {key:?}"),
        })
    };
    let label = get("label")?.clone();
    let level: u64 = get("level")?.parse().map_err(|_| Error::Parse {
        line: 0,
        msg: "invalid level".into(),
    })?;
    let weight: u32 = get("weight")?.parse().map_err(|_| Error::Parse {
        line: 0,
        msg: "invalid weight".into(),
    })?;
    let kind = TableKind::parse(get("kind")?)?;
    let bound: u64 = get("bound")?.parse().map_err(|_| Error::Parse {
        line: 0,
        msg: "invalid bound".into(),
    })?;

    if let Some(expected) = header.get("sha256") {
        let digest = hex_digest(&record_bytes);
        if !digest.eq_ignore_ascii_case(expected) {
            return Err(Error::Corrupt(format!(
                "checksum mismatch: header {expected}, computed {digest}"
            )));
        }
    }

    let descriptor = FormDescriptor::new(label, level, weight, Source::Local)?;
    match kind {
        TableKind::Ap => Ok(CoefficientTable::Prime(PrimeCoefficientTable::new(
            descriptor, bound, records,
        )?)),
        TableKind::An => {
            let mut values = Vec::with_capacity(bound as usize);
            for (expect, (index, value)) in (1..=bound).zip(records.iter()) {
                if *index != expect {
                    return Err(Error::Validation(format!(
                        "gap in integer coverage: expected n={expect}, found n={index}"
                    )));
                }
                values.push(value.clone());
            }
            if records.len() != bound as usize {
                return Err(Error::Validation(format!(
                    "expected {bound} records, found {}",
                    records.len()
                )));
            }
            Ok(CoefficientTable::Full(FullCoefficientTable::new(
                descriptor, bound, values,
            )?))
        }
    }
}

fn hex_digest(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

fn render_records<'a>(records: impl Iterator<Item = (u64, &'a BigInt)>) -> String {
    let mut out = String::new();
    for (index, value) in records {
        out.push_str(&format!("{index} {value}\n"));
    }
    out
}

/// Serialize a table; `with_checksum` adds a sha256 header over the record
/// section (used for cache files).
pub fn serialize(table: &CoefficientTable, with_checksum: bool) -> String {
    let d = table.descriptor();
    let kind = match table {
        CoefficientTable::Prime(_) => TableKind::Ap,
        CoefficientTable::Full(_) => TableKind::An,
    };
    let records = match table {
        CoefficientTable::Prime(t) => render_records(t.iter()),
        CoefficientTable::Full(t) => render_records(t.iter()),
    };
    let mut out = format!(
        "# label={} level={} weight={} kind={} bound={}\n",
        d.label,
        d.level,
        d.weight,
        kind.as_str(),
        table.bound()
    );
    if with_checksum {
        out.push_str(&format!("# sha256={}\n", hex_digest(records.as_bytes())));
    }
    out.push_str(&records);
    out
}
