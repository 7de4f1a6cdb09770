//! Report envelope, JSON and CSV emission, exit codes.

use std::io::Write;
use std::path::Path;

use dimdrop_core::Error;
use serde::Serialize;
use serde_json::Value;

use crate::config::RunConfig;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Pass = 0,
    InvariantFailure = 2,
    ConfigError = 3,
}

impl Exit {
    pub fn code(self) -> i32 {
        self as i32
    }
}

/// Library errors caused by the request itself rather than by a failed
/// construction.
pub fn is_config_error(err: &Error) -> bool {
    matches!(
        err.root(),
        Error::NotCoprime { .. }
            | Error::InvalidArgument(_)
            | Error::OddResolution(_)
            | Error::DimensionMismatch { .. }
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Envelope {
    pub tool_version: &'static str,
    pub command: String,
    pub config: RunConfig,
    /// Command arguments beyond the shared config.
    pub parameters: Value,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub report: Value,
}

impl Envelope {
    pub fn exit(&self) -> Exit {
        if self.pass {
            Exit::Pass
        } else {
            Exit::InvariantFailure
        }
    }

    pub fn render(&self, format: Format) -> String {
        let value = serde_json::to_value(self).expect("report is plain data");
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&value).expect("report is plain data");
                s.push('\n');
                s
            }
            Format::Csv => to_csv(&value),
        }
    }

    /// Writes to `path`, or to stdout when there is none.
    pub fn emit(&self, format: Format, path: Option<&Path>) -> std::io::Result<()> {
        let text = self.render(format);
        match path {
            Some(p) => {
                if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                    std::fs::create_dir_all(dir)?;
                }
                std::fs::write(p, text)
            }
            None => std::io::stdout().lock().write_all(text.as_bytes()),
        }
    }
}

/// One `key,value` row per JSON leaf; keys are dotted paths with array
/// indices, in document order.
pub fn to_csv(value: &Value) -> String {
    let mut rows = Vec::new();
    flatten(value, String::new(), &mut rows);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["key", "value"]).expect("in-memory writer");
    for (k, v) in rows {
        w.write_record([k, v]).expect("in-memory writer");
    }
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("csv is utf-8")
}

fn flatten(value: &Value, prefix: String, rows: &mut Vec<(String, String)>) {
    let join = |key: &str| if prefix.is_empty() { key.to_string() } else { format!("{prefix}.{key}") };
    match value {
        Value::Object(map) => map.iter().for_each(|(k, v)| flatten(v, join(k), rows)),
        Value::Array(items) => items.iter().enumerate().for_each(|(i, v)| flatten(v, join(&i.to_string()), rows)),
        Value::String(s) => rows.push((prefix, s.clone())),
        Value::Null => rows.push((prefix, String::new())),
        other => rows.push((prefix, other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn csv_flattens_nested_leaves() {
        let v = json!({"pass": true, "stages": [{"name": "a, b", "defect": 1e-12}], "note": null});
        let csv = to_csv(&v);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "key,value");
        assert!(lines.contains(&"stages.0.name,\"a, b\""));
        assert!(lines.contains(&"stages.0.defect,1e-12"));
        assert!(lines.contains(&"note,"));
    }

    #[test]
    fn root_errors_decide_the_exit_class() {
        let e = Error::NotCoprime { m: 4, n: 6 }.in_stage("setup");
        assert!(is_config_error(&e));
        assert!(!is_config_error(&Error::ClassMismatch { left: vec![1], right: vec![0] }));
    }
}
