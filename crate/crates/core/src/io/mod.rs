//! File formats: Matrix Market coordinate files, dense CSV, graph JSON,
//! trace JSON lines, and report output. Every real number is written with
//! 17 significant digits so that reading it back is bit-exact.

mod json;
mod matrix;
mod trace;

use std::path::Path;
use std::str::FromStr;

use serde_json::{Number, Value};
use thiserror::Error;

use crate::error::GraphError;

pub use json::{chart_to_json, graph_from_json, graph_to_json, read_graph_json, series_to_csv, to_json_string, ub_report_to_json, write_graph_json};
pub use matrix::{read_csv, read_matrix, read_mtx, write_csv, write_matrix, write_mtx, MatrixData};
pub use trace::{parse_trace, read_trace, trace_to_jsonl, write_trace};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    File { path: String, source: std::io::Error },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Format(String),
}

impl IoError {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        IoError::Parse { line, msg: msg.into() }
    }
}

/// Input and output file formats.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    MatrixMarket,
    Csv,
    GraphJson,
}

impl Format {
    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mtx" | "matrix-market" | "mm" => Some(Format::MatrixMarket),
            "csv" => Some(Format::Csv),
            "json" | "graph-json" => Some(Format::GraphJson),
            _ => None,
        }
    }

    /// Guess from the file extension.
    pub fn detect(path: &Path) -> Option<Self> {
        path.extension().and_then(|e| e.to_str()).and_then(Self::parse)
    }

    pub fn extension(self) -> &'static str {
        match self {
            Format::MatrixMarket => "mtx",
            Format::Csv => "csv",
            Format::GraphJson => "json",
        }
    }
}

pub(crate) fn read_file(path: &Path) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|source| IoError::File { path: path.display().to_string(), source })
}

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<(), IoError> {
    std::fs::write(path, contents).map_err(|source| IoError::File { path: path.display().to_string(), source })
}

/// `x` with 17 significant digits.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

/// JSON number with 17 significant digits; `null` for non-finite values.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        Value::Number(Number::from_str(&fmt_num(x)).expect("formatted float is valid JSON"))
    } else {
        Value::Null
    }
}

/// Rewrites every non-integer number in `v` with 17 significant digits.
pub fn canonical_numbers(v: Value) -> Value {
    match v {
        Value::Number(n) => {
            let s = n.to_string();
            if s.contains(['.', 'e', 'E']) {
                num(s.parse::<f64>().unwrap_or(f64::NAN))
            } else {
                Value::Number(n)
            }
        }
        Value::Array(a) => Value::Array(a.into_iter().map(canonical_numbers).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, canonical_numbers(v))).collect()),
        other => other,
    }
}

pub(crate) fn get_f64(v: &Value, key: &str, line: usize) -> Result<f64, IoError> {
    match v.get(key) {
        Some(Value::Null) => Ok(f64::NAN),
        Some(x) => x.as_f64().ok_or_else(|| IoError::parse(line, format!("field `{key}` is not a number"))),
        None => Err(IoError::parse(line, format!("missing field `{key}`"))),
    }
}

pub(crate) fn get_u64(v: &Value, key: &str, line: usize) -> Result<u64, IoError> {
    v.get(key)
        .and_then(Value::as_u64)
        .ok_or_else(|| IoError::parse(line, format!("missing or non-integer field `{key}`")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, 1.0 / 3.0, 4f64.ln(), -1e-300, 6.02e23, 0.0] {
            let s = serde_json::to_string(&num(x)).unwrap();
            let back: Value = serde_json::from_str(&s).unwrap();
            assert_eq!(back.as_f64().unwrap().to_bits(), x.to_bits());
        }
        assert_eq!(num(f64::INFINITY), Value::Null);
        assert_eq!(fmt_num(2f64.ln()), "6.9314718055994529e-1");
    }

    #[test]
    fn canonical_rewrites_floats_only() {
        let v = serde_json::json!({"a": 0.5, "b": 3, "c": [0.25]});
        let s = serde_json::to_string(&canonical_numbers(v)).unwrap();
        assert_eq!(s, r#"{"a":5.0000000000000000e-1,"b":3,"c":[2.5000000000000000e-1]}"#);
    }

    #[test]
    fn format_detection() {
        assert_eq!(Format::detect(Path::new("a/b.mtx")), Some(Format::MatrixMarket));
        assert_eq!(Format::detect(Path::new("x.CSV")), Some(Format::Csv));
        assert_eq!(Format::detect(Path::new("g.json")), Some(Format::GraphJson));
        assert_eq!(Format::detect(Path::new("noext")), None);
    }
}
