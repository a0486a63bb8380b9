//! Report envelope and its JSON/CSV encodings.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const SCHEMA_VERSION: &str = "1.0.0";

pub const SCHEMA: &str = include_str!("../schema/report.schema.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnType {
    Integer,
    Number,
    String,
    Boolean,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    #[serde(rename = "type")]
    pub kind: ColumnType,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Value>>,
}

#[derive(Debug, thiserror::Error)]
pub enum TableError {
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("header {found:?} does not match the declared columns {expected:?}")]
    Header {
        expected: Vec<String>,
        found: Vec<String>,
    },
    #[error("row {row}, column `{column}`: cannot read {text:?} as {kind:?}")]
    Cell {
        row: usize,
        column: String,
        text: String,
        kind: ColumnType,
    },
}

impl Table {
    pub fn new(columns: &[(&str, ColumnType)]) -> Self {
        Self {
            columns: columns
                .iter()
                .map(|&(name, kind)| Column {
                    name: name.to_string(),
                    kind,
                })
                .collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String, TableError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(self.columns.iter().map(|c| c.name.as_str()))?;
        for row in &self.rows {
            w.write_record(row.iter().map(cell_text))?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| TableError::Csv(e.into_error().into()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    /// Reads CSV produced by [`Table::to_csv`] back, typing cells by the
    /// declared columns.
    pub fn from_csv(columns: &[Column], text: &str) -> Result<Self, TableError> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let found: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
        let expected: Vec<String> = columns.iter().map(|c| c.name.clone()).collect();
        if found != expected {
            return Err(TableError::Header { expected, found });
        }
        let mut rows = Vec::new();
        for (i, rec) in r.records().enumerate() {
            let rec = rec?;
            let row = rec
                .iter()
                .zip(columns)
                .map(|(text, col)| {
                    parse_cell(text, col.kind).ok_or_else(|| TableError::Cell {
                        row: i,
                        column: col.name.clone(),
                        text: text.to_string(),
                        kind: col.kind,
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            rows.push(row);
        }
        Ok(Self {
            columns: columns.to_vec(),
            rows,
        })
    }
}

fn cell_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn parse_cell(text: &str, kind: ColumnType) -> Option<Value> {
    match kind {
        ColumnType::Integer => text.parse::<i64>().ok().map(Value::from),
        ColumnType::Number => text
            .parse::<f64>()
            .ok()
            .and_then(|x| serde_json::Number::from_f64(x).map(Value::Number)),
        ColumnType::String => Some(Value::String(text.to_string())),
        ColumnType::Boolean => text.parse::<bool>().ok().map(Value::Bool),
    }
}

pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x)
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportEnvelope {
    pub command: String,
    pub params: BTreeMap<String, Value>,
    pub results: Table,
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub timestamp: String,
    pub schema_version: String,
}

impl ReportEnvelope {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let mut t = Table::new(&[
            ("n", ColumnType::Integer),
            ("x", ColumnType::Number),
            ("label", ColumnType::String),
            ("ok", ColumnType::Boolean),
        ]);
        t.push(vec![
            Value::from(3),
            num(0.1 + 0.2),
            Value::from("a, \"b\""),
            Value::from(true),
        ]);
        t.push(vec![
            Value::from(-1),
            num(1e-300),
            Value::from(""),
            Value::from(false),
        ]);
        let back = Table::from_csv(&t.columns, &t.to_csv().unwrap()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn header_mismatch() {
        let t = Table::new(&[("a", ColumnType::Number)]);
        let other = Table::new(&[("b", ColumnType::Number)]);
        assert!(matches!(
            Table::from_csv(&other.columns, &t.to_csv().unwrap()),
            Err(TableError::Header { .. })
        ));
    }

    #[test]
    fn schema_is_json() {
        let v: Value = serde_json::from_str(SCHEMA).unwrap();
        assert_eq!(v["properties"]["schema_version"]["const"], SCHEMA_VERSION);
    }
}
