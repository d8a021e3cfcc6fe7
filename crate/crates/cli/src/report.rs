//! Report envelope and serialization. JSON is the native form; CSV is a
//! lossless flattening of the same document, floats printed with 17
//! significant digits so both formats carry identical values.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::{CliError, CliResult};

pub const SCHEMA: &str = "polymoment-report v1";

#[derive(Debug, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub artifact_version: &'static str,
    /// Canonical rendering of the resolved configuration.
    pub config: Value,
    pub q: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub modulus_code: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi_star: Option<u64>,
    pub wall_time_ms: f64,
    pub data: Value,
}

impl Report {
    pub fn new(q: u64, config: Value, data: Value) -> Self {
        Report {
            schema: SCHEMA,
            artifact_version: env!("CARGO_PKG_VERSION"),
            config,
            q,
            modulus_code: None,
            phi_star: None,
            wall_time_ms: 0.0,
            data,
        }
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }

    pub fn to_csv(&self) -> String {
        let value = serde_json::to_value(self).expect("report serializes");
        let mut rows = Vec::new();
        flatten(&value, String::new(), &mut rows);
        let mut out = String::from("key,value\n");
        for (key, val) in rows {
            out.push_str(&key);
            out.push(',');
            out.push_str(&csv_quote(&val));
            out.push('\n');
        }
        out
    }

    pub fn render(&self, format: crate::cli::OutputFormat) -> String {
        match format {
            crate::cli::OutputFormat::Json => self.to_json(),
            crate::cli::OutputFormat::Csv => self.to_csv(),
        }
    }

    pub fn write(&self, format: crate::cli::OutputFormat, out: Option<&Path>) -> CliResult<()> {
        let text = self.render(format);
        match out {
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout
                    .write_all(text.as_bytes())
                    .map_err(|e| CliError::Config(format!("cannot write report: {e}")))?;
            }
            Some(path) => {
                fs::write(path, text)
                    .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))?;
            }
        }
        Ok(())
    }
}

/// Depth-first flattening: objects extend the path with `.key`, arrays with
/// `[i]`. Floats are printed in scientific form with 16 fractional digits.
fn flatten(value: &Value, path: String, rows: &mut Vec<(String, String)>) {
    match value {
        Value::Object(map) => {
            for (key, sub) in map {
                let next = if path.is_empty() { key.clone() } else { format!("{path}.{key}") };
                flatten(sub, next, rows);
            }
        }
        Value::Array(items) => {
            if items.is_empty() {
                rows.push((path, "[]".into()));
                return;
            }
            for (i, sub) in items.iter().enumerate() {
                flatten(sub, format!("{path}[{i}]"), rows);
            }
        }
        Value::Null => rows.push((path, String::new())),
        Value::Bool(b) => rows.push((path, b.to_string())),
        Value::String(s) => rows.push((path, s.clone())),
        Value::Number(n) => {
            let text = if let Some(u) = n.as_u64() {
                u.to_string()
            } else if let Some(i) = n.as_i64() {
                i.to_string()
            } else {
                format!("{:.16e}", n.as_f64().expect("numeric"))
            };
            rows.push((path, text));
        }
    }
}

fn csv_quote(field: &str) -> String {
    if field.contains(',') || field.contains('"') || field.contains('\n') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

/// Serialize a complex scalar as a two-field object.
pub fn complex_value(z: num_complex::Complex64) -> Value {
    serde_json::json!({ "re": z.re, "im": z.im })
}

pub fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("value serializes")
}
