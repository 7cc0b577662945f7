//! Batch analysis of CSV (`id,psi,phi` with `;`-separated weights) or JSONL
//! records. Each record yields one output line, either a report or an error.

use std::collections::HashSet;
use std::fs;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::commands::analysis;
use crate::error::CliError;
use crate::input::{parse_list, parse_value, ParseOptions, VectorPair};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BatchSummary {
    pub records: usize,
    pub ok: usize,
    pub failed: usize,
}

/// One parsed input row. `id` is `None` when the row is too broken to have one.
struct RawRecord {
    line: usize,
    id: Option<String>,
    body: Result<(Value, Value), CliError>,
    csv: bool,
}

fn is_jsonl(path: &Path, text: &str) -> bool {
    match path.extension().and_then(|e| e.to_str()) {
        Some("csv") => false,
        Some("jsonl" | "json" | "ndjson") => true,
        _ => text.trim_start().starts_with('{'),
    }
}

fn read_jsonl(text: &str) -> Vec<RawRecord> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            let line = i + 1;
            let parsed: Result<Value, _> = serde_json::from_str(l);
            match parsed {
                Ok(Value::Object(map)) => {
                    let id = map.get("id").map(|v| match v {
                        Value::String(s) => s.clone(),
                        other => other.to_string(),
                    });
                    let body = match (map.get("psi"), map.get("phi")) {
                        (Some(psi), Some(phi)) => Ok((psi.clone(), phi.clone())),
                        _ => Err(CliError::new("Parse", "record needs \"psi\" and \"phi\"")),
                    };
                    let body = if id.is_none() {
                        Err(CliError::new("Parse", "record needs an \"id\""))
                    } else {
                        body
                    };
                    RawRecord {
                        line,
                        id,
                        body,
                        csv: false,
                    }
                }
                Ok(_) => RawRecord {
                    line,
                    id: None,
                    body: Err(CliError::new("Parse", "record is not a JSON object")),
                    csv: false,
                },
                Err(e) => RawRecord {
                    line,
                    id: None,
                    body: Err(CliError::new("Parse", format!("invalid JSON: {e}"))),
                    csv: false,
                },
            }
        })
        .collect()
}

fn read_csv(text: &str) -> Result<Vec<RawRecord>, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| CliError::io(format!("unreadable CSV header: {e}")))?
        .clone();
    if headers.is_empty() || headers.iter().all(str::is_empty) {
        return Ok(Vec::new());
    }
    let column = |name: &str| headers.iter().position(|h| h == name);
    let (Some(id_col), Some(psi_col), Some(phi_col)) = (column("id"), column("psi"), column("phi"))
    else {
        return Err(CliError::usage("CSV header must contain id, psi and phi"));
    };

    Ok(reader
        .records()
        .enumerate()
        .map(|(i, row)| {
            let line = i + 2;
            match row {
                Ok(row) => {
                    let id = row.get(id_col).map(str::to_string);
                    let body = match (row.get(psi_col), row.get(phi_col)) {
                        (Some(psi), Some(phi)) => Ok((json!(psi), json!(phi))),
                        _ => Err(CliError::new(
                            "Parse",
                            format!("line {line}: missing column"),
                        )),
                    };
                    RawRecord {
                        line,
                        id,
                        body,
                        csv: true,
                    }
                }
                Err(e) => RawRecord {
                    line,
                    id: None,
                    body: Err(CliError::new("Parse", e.to_string())),
                    csv: true,
                },
            }
        })
        .collect())
}

fn analyze_record(
    raw: &RawRecord,
    opts: ParseOptions,
    pad: bool,
    trace: bool,
) -> Result<Value, CliError> {
    let (psi, phi) = raw.body.as_ref().map_err(Clone::clone)?;
    let parse = |v: &Value| match (raw.csv, v) {
        (true, Value::String(s)) => parse_list(s, opts),
        _ => parse_value(v, opts),
    };
    let mut pair = VectorPair::new(parse(psi)?, parse(phi)?)?;
    if pad {
        pair = pair.padded()?;
    }
    analysis(&pair, trace)
}

/// Processes every record in `input` and writes one JSON line per record to
/// `out`. Only an unreadable input file is an error.
pub fn run(
    input: &Path,
    out: &mut dyn Write,
    opts: ParseOptions,
    pad: bool,
    trace: bool,
) -> Result<BatchSummary, CliError> {
    let text = fs::read_to_string(input)
        .map_err(|e| CliError::io(format!("cannot read {}: {e}", input.display())))?;
    let records = if is_jsonl(input, &text) {
        read_jsonl(&text)
    } else {
        read_csv(&text)?
    };

    let mut seen = HashSet::new();
    let duplicate: Vec<bool> = records
        .iter()
        .map(|r| r.id.as_ref().is_some_and(|id| !seen.insert(id.clone())))
        .collect();

    let lines: Vec<(bool, Value)> = records
        .par_iter()
        .zip(&duplicate)
        .map(|(r, &dup)| {
            let result = if dup {
                Err(CliError::new(
                    "DuplicateId",
                    format!("id {:?} already used", r.id.as_deref().unwrap_or("")),
                ))
            } else {
                analyze_record(r, opts, pad, trace)
            };
            match result {
                Ok(report) => (true, json!({"id": r.id, "line": r.line, "report": report})),
                Err(e) => (false, json!({"id": r.id, "line": r.line, "error": e})),
            }
        })
        .collect();

    let io = |e: std::io::Error| CliError::io(e.to_string());
    for (_, line) in &lines {
        writeln!(out, "{line}").map_err(io)?;
    }
    out.flush().map_err(io)?;
    let ok = lines.iter().filter(|(ok, _)| *ok).count();
    Ok(BatchSummary {
        records: lines.len(),
        ok,
        failed: lines.len() - ok,
    })
}
