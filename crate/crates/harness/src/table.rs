//! Typed result tables with exact CSV and JSON round-trips.
//!
//! Floats are quantized to 12 significant digits when inserted, so the
//! shortest decimal form written to either format parses back to the same
//! value.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnType {
    Int,
    Float,
    Bool,
    Text,
}

impl ColumnType {
    fn name(self) -> &'static str {
        match self {
            ColumnType::Int => "int",
            ColumnType::Float => "float",
            ColumnType::Bool => "bool",
            ColumnType::Text => "text",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "int" => ColumnType::Int,
            "float" => ColumnType::Float,
            "bool" => ColumnType::Bool,
            "text" => ColumnType::Text,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    #[serde(rename = "type")]
    pub kind: ColumnType,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Float(f64),
    Bool(bool),
    Text(String),
    Null,
}

impl Cell {
    /// Float cell rounded to 12 significant digits; non-finite becomes null.
    pub fn float(v: f64) -> Self {
        if v.is_finite() {
            Cell::Float(quantize(v))
        } else {
            Cell::Null
        }
    }

    pub fn opt_float(v: Option<f64>) -> Self {
        v.map_or(Cell::Null, Cell::float)
    }

    pub fn text(s: impl Into<String>) -> Self {
        Cell::Text(s.into())
    }

    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            Cell::Float(v) => Some(v),
            Cell::Int(v) => Some(v as f64),
            _ => None,
        }
    }

    fn fits(&self, kind: ColumnType) -> bool {
        matches!(
            (self, kind),
            (Cell::Null, _)
                | (Cell::Int(_), ColumnType::Int)
                | (Cell::Float(_), ColumnType::Float)
                | (Cell::Bool(_), ColumnType::Bool)
                | (Cell::Text(_), ColumnType::Text)
        )
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Int(v) => Value::from(*v),
            Cell::Float(v) => Value::from(*v),
            Cell::Bool(v) => Value::from(*v),
            Cell::Text(s) => Value::from(s.as_str()),
            Cell::Null => Value::Null,
        }
    }

    fn from_json(v: &Value, kind: ColumnType) -> Option<Self> {
        Some(match (v, kind) {
            (Value::Null, _) => Cell::Null,
            (Value::Number(n), ColumnType::Int) => Cell::Int(n.as_u64()?),
            (Value::Number(n), ColumnType::Float) => Cell::Float(n.as_f64()?),
            (Value::Bool(b), ColumnType::Bool) => Cell::Bool(*b),
            (Value::String(s), ColumnType::Text) => Cell::Text(s.clone()),
            _ => return None,
        })
    }

    fn from_csv(s: &str, kind: ColumnType) -> Option<Self> {
        if s.is_empty() && kind != ColumnType::Text {
            return Some(Cell::Null);
        }
        Some(match kind {
            ColumnType::Int => Cell::Int(s.parse().ok()?),
            ColumnType::Float => Cell::Float(s.parse().ok()?),
            ColumnType::Bool => Cell::Bool(s.parse().ok()?),
            ColumnType::Text => Cell::Text(s.to_string()),
        })
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Int(v) => write!(f, "{v}"),
            Cell::Float(v) => write!(f, "{v}"),
            Cell::Bool(v) => write!(f, "{v}"),
            Cell::Text(s) => f.write_str(s),
            Cell::Null => Ok(()),
        }
    }
}

/// Rounds to 12 significant digits.
pub fn quantize(v: f64) -> f64 {
    format!("{v:.11e}").parse().expect("formatted float parses")
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub metadata: BTreeMap<String, String>,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonTable {
    metadata: BTreeMap<String, String>,
    columns: Vec<Column>,
    rows: Vec<Vec<Value>>,
}

impl ResultTable {
    pub fn new(columns: &[(&str, ColumnType)]) -> Self {
        Self {
            metadata: BTreeMap::new(),
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

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        for (cell, col) in row.iter().zip(&self.columns) {
            assert!(cell.fits(col.kind), "cell {cell:?} in {} column {}", col.kind.name(), col.name);
        }
        self.rows.push(row);
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Cell>> {
        let i = self.column_index(name)?;
        Some(self.rows.iter().map(|r| &r[i]).collect())
    }

    /// Stable sort on a numeric column.
    pub fn sort_by_column(&mut self, name: &str) {
        if let Some(i) = self.column_index(name) {
            self.rows.sort_by(|a, b| {
                let (x, y) = (a[i].as_f64(), b[i].as_f64());
                x.partial_cmp(&y).unwrap_or(std::cmp::Ordering::Equal)
            });
        }
    }

    /// CSV with `# key=value` metadata lines, a `# types=` line and a header.
    pub fn to_csv(&self) -> Result<String, HarnessError> {
        let mut out = String::new();
        for (k, v) in &self.metadata {
            out.push_str(&format!("# {k}={v}\n"));
        }
        let types: Vec<_> = self.columns.iter().map(|c| c.kind.name()).collect();
        out.push_str(&format!("# types={}\n", types.join(",")));
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(self.columns.iter().map(|c| c.name.as_str()))?;
        for row in &self.rows {
            w.write_record(row.iter().map(|c| c.to_string()))?;
        }
        let body = w.into_inner().map_err(|e| HarnessError::Io(e.into_error()))?;
        out.push_str(&String::from_utf8(body).expect("cells are valid UTF-8"));
        Ok(out)
    }

    pub fn from_csv(text: &str) -> Result<Self, HarnessError> {
        let mut metadata = BTreeMap::new();
        let mut types = None;
        let mut body_start = 0;
        for line in text.split_inclusive('\n') {
            let Some(meta) = line.strip_prefix("# ") else {
                break;
            };
            body_start += line.len();
            let (k, v) = meta
                .trim_end_matches(['\n', '\r'])
                .split_once('=')
                .ok_or_else(|| HarnessError::Table(format!("bad metadata line {line:?}")))?;
            if k == "types" {
                types = Some(
                    v.split(',')
                        .map(|t| ColumnType::parse(t).ok_or_else(|| HarnessError::Table(format!("unknown column type {t:?}"))))
                        .collect::<Result<Vec<_>, _>>()?,
                );
            } else {
                metadata.insert(k.to_string(), v.to_string());
            }
        }
        let types = types.ok_or_else(|| HarnessError::Table("missing '# types=' line".into()))?;
        let mut r = csv::Reader::from_reader(&text.as_bytes()[body_start..]);
        let names: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
        if names.len() != types.len() {
            return Err(HarnessError::Table(format!(
                "{} column names but {} types",
                names.len(),
                types.len()
            )));
        }
        let columns: Vec<Column> = names
            .into_iter()
            .zip(&types)
            .map(|(name, &kind)| Column { name, kind })
            .collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            let row = rec
                .iter()
                .zip(&columns)
                .map(|(s, c)| {
                    Cell::from_csv(s, c.kind)
                        .ok_or_else(|| HarnessError::Table(format!("bad {} value {s:?} in column {}", c.kind.name(), c.name)))
                })
                .collect::<Result<Vec<_>, _>>()?;
            rows.push(row);
        }
        Ok(Self {
            metadata,
            columns,
            rows,
        })
    }

    pub fn to_json(&self) -> String {
        let doc = JsonTable {
            metadata: self.metadata.clone(),
            columns: self.columns.clone(),
            rows: self
                .rows
                .iter()
                .map(|r| r.iter().map(Cell::to_json).collect())
                .collect(),
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("table serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let doc: JsonTable = serde_json::from_str(text).map_err(|e| HarnessError::parse("table", &e))?;
        let mut rows = Vec::with_capacity(doc.rows.len());
        for r in &doc.rows {
            if r.len() != doc.columns.len() {
                return Err(HarnessError::Table("row width differs from schema".into()));
            }
            rows.push(
                r.iter()
                    .zip(&doc.columns)
                    .map(|(v, c)| {
                        Cell::from_json(v, c.kind)
                            .ok_or_else(|| HarnessError::Table(format!("bad value {v} in column {}", c.name)))
                    })
                    .collect::<Result<Vec<_>, _>>()?,
            );
        }
        Ok(Self {
            metadata: doc.metadata,
            columns: doc.columns,
            rows,
        })
    }
}
