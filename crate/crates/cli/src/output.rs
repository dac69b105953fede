//! Metadata header plus CSV or JSON tables.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Ordered key/value header carried by every artifact.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Metadata(Map<String, Value>);

impl Metadata {
    pub fn new(command: &str, seed: u64, tol: f64) -> Self {
        let mut m = Metadata::default();
        m.set("tool", "lnsurrogate");
        m.set("version", env!("CARGO_PKG_VERSION"));
        m.set("command", command);
        m.set("seed", seed);
        m.set("forward_tol", tol);
        m.set("eta_mu_format", "format1");
        m
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.0.insert(key.to_string(), value.into());
        self
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.0.get(key)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Missing,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => fmt_f64(*v),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Missing => String::new(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

/// 17 significant digits, enough to round-trip any f64.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<String>) -> Self {
        Table { columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Cell>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| &r[i]).collect())
    }
}

pub fn render_table(format: Format, meta: &Metadata, table: &Table) -> String {
    match format {
        Format::Csv => {
            let mut s = String::new();
            for (k, v) in &meta.0 {
                let v = match v {
                    Value::String(t) => t.clone(),
                    other => other.to_string(),
                };
                s.push_str(&format!("# {k}: {v}\n"));
            }
            s.push_str(&table.columns.join(","));
            s.push('\n');
            for row in &table.rows {
                let cells: Vec<String> = row.iter().map(Cell::csv).collect();
                s.push_str(&cells.join(","));
                s.push('\n');
            }
            s
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Doc<'a> {
                metadata: &'a Metadata,
                columns: &'a [String],
                rows: &'a [Vec<Cell>],
            }
            let doc = Doc { metadata: meta, columns: &table.columns, rows: &table.rows };
            let mut s = serde_json::to_string_pretty(&doc).expect("table serializes");
            s.push('\n');
            s
        }
    }
}

/// Write to `out`, or stdout when absent.
pub fn emit(text: &str, out: Option<&Path>) -> CliResult<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|source| CliError::Io { path: p.display().to_string(), source }),
        None => {
            let mut h = std::io::stdout().lock();
            h.write_all(text.as_bytes())
                .and_then(|_| h.flush())
                .map_err(|source| CliError::Io { path: "<stdout>".into(), source })
        }
    }
}
