//! Emitters for JSON objects, NDJSON report streams and small CSV tables.
//!
//! Every float goes through [`fmt_num`], so output is byte-stable across
//! platforms. Non-finite floats are written as the strings `"inf"`, `"-inf"`
//! and `"nan"` in JSON.

use std::fmt::Write as _;
use std::io::{self, Write};

use serde::Serialize;
use serde_json::Value;
use uavplace::format::fmt_num;

fn push_number(n: &serde_json::Number, out: &mut String) {
    if n.is_f64() {
        let v = n.as_f64().expect("f64 number");
        out.push_str(&fmt_num(v));
    } else {
        write!(out, "{n}").expect("writing to a string");
    }
}

fn push_value(v: &Value, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => push_number(n, out),
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                push_value(item, out);
            }
            out.push(']');
        }
        Value::Object(map) => {
            out.push('{');
            for (i, (k, item)) in map.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&Value::String(k.clone()).to_string());
                out.push(':');
                push_value(item, out);
            }
            out.push('}');
        }
    }
}

/// Serializes `item` as one line of compact JSON with formatted numbers.
pub fn json_line<T: Serialize>(item: &T) -> String {
    let value = serde_json::to_value(item).expect("report types serialize");
    let mut out = String::new();
    push_value(&value, &mut out);
    out
}

/// One line of JSON from named fields; pair with [`num`] to keep non-finite
/// floats visible.
pub fn json_object(fields: Vec<(&str, Value)>) -> String {
    let map: serde_json::Map<String, Value> = fields
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
    let mut out = String::new();
    push_value(&Value::Object(map), &mut out);
    out
}

/// JSON value for a float; non-finite values become strings.
pub fn num(v: f64) -> Value {
    serde_json::Number::from_f64(v)
        .map(Value::Number)
        .unwrap_or_else(|| Value::String(fmt_num(v)))
}

/// Writes a CSV table whose cells are already formatted.
pub fn write_table<W: Write>(out: W, header: &[&str], rows: &[Vec<String>]) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()
}
