//! JSON-lines dataset files: one header line naming the schema and version,
//! then one record per line.

use std::io::{BufRead, Write};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::TextError;

pub const SCHEMA_VERSION: u32 = 1;
pub const GOAL_SCHEMA: &str = "goalbridge-goal-record";
pub const STS_SCHEMA: &str = "goalbridge-sts-pair";
pub const SCENARIO_SCHEMA: &str = "goalbridge-scenario";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Header {
    pub schema: String,
    pub version: u32,
    pub count: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

pub fn write<W: Write, T: Serialize>(
    mut w: W,
    schema: &str,
    seed: Option<u64>,
    records: &[T],
) -> std::io::Result<()> {
    let header = Header {
        schema: schema.to_string(),
        version: SCHEMA_VERSION,
        count: records.len(),
        seed,
    };
    serde_json::to_writer(&mut w, &header)?;
    writeln!(w)?;
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        writeln!(w)?;
    }
    w.flush()
}

pub fn to_string<T: Serialize>(schema: &str, seed: Option<u64>, records: &[T]) -> String {
    let mut buf = Vec::new();
    write(&mut buf, schema, seed, records).expect("writing to memory");
    String::from_utf8(buf).expect("json is utf-8")
}

/// Read a file written by [`write`], checking schema, version and count.
pub fn read<R: BufRead, T: DeserializeOwned>(r: R, schema: &str) -> Result<(Header, Vec<T>), TextError> {
    let mut lines = r.lines();
    let fmt = |e: &dyn std::fmt::Display| TextError::Format(e.to_string());
    let first = lines
        .next()
        .ok_or_else(|| TextError::Format("missing header line".into()))?
        .map_err(|e| fmt(&e))?;
    let header: Header = serde_json::from_str(&first).map_err(|e| fmt(&e))?;
    if header.schema != schema {
        return Err(TextError::Format(format!("expected schema {schema}, found {}", header.schema)));
    }
    if header.version != SCHEMA_VERSION {
        return Err(TextError::Format(format!("unsupported version {}", header.version)));
    }
    let mut out = Vec::with_capacity(header.count);
    for (n, line) in lines.enumerate() {
        let line = line.map_err(|e| fmt(&e))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec = serde_json::from_str(&line).map_err(|e| TextError::Format(format!("line {}: {e}", n + 2)))?;
        out.push(rec);
    }
    if out.len() != header.count {
        return Err(TextError::Format(format!(
            "header announces {} records, found {}",
            header.count,
            out.len()
        )));
    }
    Ok((header, out))
}
