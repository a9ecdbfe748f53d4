//! Text output with a fixed float format.
//!
//! Every float is printed with 17 significant digits in scientific
//! notation, so values round-trip exactly and files are byte-stable.

use std::fmt::Write;

use serde::Serialize;
use serde_json::Value;

use crate::error::{CliError, CliResult};

/// `x` with 17 significant digits; `nan`, `inf` and `-inf` otherwise.
pub fn fmt_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// Pretty JSON with two-space indentation and [`fmt_float`] numbers.
/// Non-finite floats become `null`.
pub fn to_json<T: Serialize>(value: &T) -> CliResult<String> {
    let v = serde_json::to_value(value)
        .map_err(|e| CliError::Numeric(format!("cannot serialise output: {e}")))?;
    let mut out = String::new();
    write_value(&mut out, &v, 0);
    out.push('\n');
    Ok(out)
}

fn write_value(out: &mut String, v: &Value, depth: usize) {
    let pad = |out: &mut String, d: usize| out.extend(std::iter::repeat_n("  ", d));
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_u64() {
                write!(out, "{i}").unwrap();
            } else if let Some(i) = n.as_i64() {
                write!(out, "{i}").unwrap();
            } else {
                out.push_str(&fmt_float(n.as_f64().unwrap_or(f64::NAN)));
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Array(items) => {
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                pad(out, depth + 1);
                write_value(out, item, depth + 1);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            pad(out, depth);
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            out.push_str("{\n");
            for (i, (k, item)) in map.iter().enumerate() {
                pad(out, depth + 1);
                write!(out, "{}: ", Value::String(k.clone())).unwrap();
                write_value(out, item, depth + 1);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            pad(out, depth);
            out.push('}');
        }
    }
}

/// A CSV table with a fixed header and LF line endings.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    header: &'static str,
    body: String,
    rows: usize,
}

impl Table {
    pub fn new(header: &'static str) -> Self {
        Table {
            header,
            body: String::new(),
            rows: 0,
        }
    }

    /// Appends `x,y,scenario,method`.
    pub fn push(&mut self, x: f64, y: f64, scenario: &str, method: &str) {
        writeln!(
            self.body,
            "{},{},{},{}",
            fmt_float(x),
            fmt_float(y),
            csv_field(scenario),
            csv_field(method)
        )
        .unwrap();
        self.rows += 1;
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn render(&self) -> String {
        format!("{}\n{}", self.header, self.body)
    }
}

/// Quotes a field when it holds a separator, quote or line break.
fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
