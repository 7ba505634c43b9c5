//! Structured report records: JSON Lines and CSV encodings.
//!
//! Every record is a flat-at-the-top JSON object carrying `schema_version`,
//! `command`, `record`, `engine`, `seed` and `tolerance` next to its payload.
//! Numbers use the shortest representation that round-trips exactly, in both
//! encodings.

use std::io::Write;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{GeomError, Result};
use crate::linalg::CMat;
use crate::wirtinger::Engine;

pub const SCHEMA_VERSION: u32 = 1;

pub type Record = Map<String, Value>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Fields shared by every record of one run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecordMeta {
    pub command: &'static str,
    pub engine: Engine,
    pub seed: u64,
    pub tolerance: f64,
}

fn io_error(e: impl std::fmt::Display) -> GeomError {
    GeomError::Config(format!("cannot write report: {e}"))
}

/// Merges the run metadata with a serializable payload.
pub fn record(meta: &RecordMeta, kind: &str, body: &impl Serialize) -> Result<Record> {
    let mut out = Map::new();
    out.insert("schema_version".into(), SCHEMA_VERSION.into());
    out.insert("command".into(), meta.command.into());
    out.insert("record".into(), kind.into());
    match serde_json::to_value(body).map_err(io_error)? {
        Value::Object(fields) => out.extend(fields),
        other => {
            out.insert("value".into(), other);
        }
    }
    out.insert("engine".into(), meta.engine.as_str().into());
    out.insert("seed".into(), meta.seed.into());
    out.insert("tolerance".into(), meta.tolerance.into());
    Ok(out)
}

/// A complex matrix as nested `[re, im]` pairs, row-major.
pub fn matrix_json(m: &CMat) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| Value::Array((0..m.ncols()).map(|j| serde_json::json!([m[(i, j)].re, m[(i, j)].im])).collect()))
            .collect(),
    )
}

pub fn write_json_lines(records: &[Record], w: &mut dyn Write) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut *w, r).map_err(io_error)?;
        w.write_all(b"\n").map_err(io_error)?;
    }
    Ok(())
}

/// Nested arrays and objects become dotted column names, e.g. `g.0.1.0`.
pub fn flatten(value: &Value, prefix: &str, out: &mut Vec<(String, String)>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                flatten(v, &key(k), out);
            }
        }
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                flatten(v, &key(&i.to_string()), out);
            }
        }
        Value::Null => out.push((prefix.to_string(), String::new())),
        Value::Bool(b) => out.push((prefix.to_string(), b.to_string())),
        Value::Number(n) => out.push((prefix.to_string(), n.to_string())),
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
    }
}

/// CSV with the union of all flattened columns in first-seen order.
pub fn write_csv(records: &[Record], w: &mut dyn Write) -> Result<()> {
    let rows: Vec<Vec<(String, String)>> = records
        .iter()
        .map(|r| {
            let mut cells = Vec::new();
            flatten(&Value::Object(r.clone()), "", &mut cells);
            cells
        })
        .collect();
    let mut header: Vec<String> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for row in &rows {
        for (k, _) in row {
            if seen.insert(k.clone()) {
                header.push(k.clone());
            }
        }
    }
    let mut out = csv::Writer::from_writer(w);
    out.write_record(&header).map_err(io_error)?;
    for row in &rows {
        let lookup: std::collections::HashMap<&str, &str> = row.iter().map(|(k, v)| (k.as_str(), v.as_str())).collect();
        out.write_record(header.iter().map(|h| lookup.get(h.as_str()).copied().unwrap_or("")))
            .map_err(io_error)?;
    }
    out.flush().map_err(io_error)?;
    Ok(())
}

pub fn write_records(records: &[Record], format: Format, w: &mut dyn Write) -> Result<()> {
    match format {
        Format::Json => write_json_lines(records, w),
        Format::Csv => write_csv(records, w),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c64;

    #[derive(Serialize)]
    struct Body {
        x: f64,
        m: Value,
        note: Option<String>,
    }

    fn sample() -> Vec<Record> {
        let meta = RecordMeta {
            command: "analyze",
            engine: Engine::Jets,
            seed: 3,
            tolerance: 1e-6,
        };
        let m = CMat::from_fn(2, 2, |i, j| c64(0.1 * i as f64 + 1.0 / 3.0, j as f64 * 1e-300));
        vec![
            record(&meta, "point", &Body { x: 0.1 + 0.2, m: matrix_json(&m), note: None }).unwrap(),
            record(&meta, "point", &Body { x: -2.5e-17, m: matrix_json(&m), note: Some("a,b".into()) }).unwrap(),
        ]
    }

    #[test]
    fn every_record_carries_the_schema_fields() {
        for r in sample() {
            for k in ["schema_version", "command", "record", "engine", "seed", "tolerance"] {
                assert!(r.contains_key(k), "{k}");
            }
        }
    }

    #[test]
    fn csv_and_json_encode_identical_numbers() {
        let recs = sample();
        let mut csv_bytes = Vec::new();
        write_csv(&recs, &mut csv_bytes).unwrap();
        let mut reader = csv::Reader::from_reader(csv_bytes.as_slice());
        let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
        for (row, rec) in reader.records().zip(&recs) {
            let row = row.unwrap();
            let mut cells = Vec::new();
            flatten(&Value::Object(rec.clone()), "", &mut cells);
            for (k, v) in cells {
                let i = header.iter().position(|h| *h == k).unwrap();
                assert_eq!(&row[i], v.as_str());
                if let Ok(x) = v.parse::<f64>() {
                    assert_eq!(row[i].parse::<f64>().unwrap(), x);
                }
            }
        }
    }

    #[test]
    fn json_round_trips_floats_exactly() {
        let recs = sample();
        let mut bytes = Vec::new();
        write_json_lines(&recs, &mut bytes).unwrap();
        let line = String::from_utf8(bytes).unwrap();
        let back: Record = serde_json::from_str(line.lines().next().unwrap()).unwrap();
        assert_eq!(back["x"].as_f64().unwrap(), 0.1 + 0.2);
    }
}
