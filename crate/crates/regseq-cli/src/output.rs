use std::fmt::Write as _;
use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::Value;

use crate::cli::Format;

/// A rendered command result: JSON document plus a CSV table.
pub struct Artifact {
    pub json: Value,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Artifact {
    pub fn render(&self, format: Format, meta: bool) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).expect("JSON values serialise");
                s.push('\n');
                s
            }
            Format::Csv => {
                let mut s = String::new();
                if meta {
                    let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
                    let _ = writeln!(s, "# regseq {} generated-unix {}", env!("CARGO_PKG_VERSION"), secs);
                }
                s.push_str(&csv_table(&self.header, &self.rows));
                s
            }
            Format::Text => text(&self.json),
        }
    }
}

pub fn csv_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for r in rows {
        s.push_str(&r.join(","));
        s.push('\n');
    }
    s
}

fn text(v: &Value) -> String {
    let mut s = String::new();
    write_text(&mut s, v, "");
    s
}

fn write_text(s: &mut String, v: &Value, prefix: &str) {
    match v {
        Value::Object(map) => {
            for (k, val) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                if is_scalarish(val) {
                    let _ = writeln!(s, "{key}: {}", val);
                } else {
                    write_text(s, val, &key);
                }
            }
        }
        Value::Array(items) => {
            for (i, val) in items.iter().enumerate() {
                let key = format!("{prefix}[{i}]");
                if is_scalarish(val) {
                    let _ = writeln!(s, "{key}: {}", val);
                } else {
                    write_text(s, val, &key);
                }
            }
        }
        other => {
            let _ = writeln!(s, "{prefix}: {other}");
        }
    }
}

/// Scalars and `[re, im]` pairs print on one line.
fn is_scalarish(v: &Value) -> bool {
    match v {
        Value::Array(a) => a.len() <= 2 && a.iter().all(|x| x.is_number() || x.is_null()),
        Value::Object(_) => false,
        _ => true,
    }
}
