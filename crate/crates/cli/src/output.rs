use std::fs;
use std::path::Path;

use clap::ValueEnum;
use serde_json::Value;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

/// A command result: the machine-readable document plus a flat table.
#[derive(Debug, Clone)]
pub struct Report {
    pub json: Value,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

/// Numbers in tables and CSV: shortest round-trip form, scientific outside
/// `[1e-4, 1e6)`.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-4..1e6).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn cell(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some(String::new()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.as_f64().map(num).unwrap_or_else(|| n.to_string())),
        Value::String(s) => Some(s.clone()),
        Value::Array(_) | Value::Object(_) => None,
    }
}

impl Report {
    /// A one-row report from the scalar fields of `json`, in key order.
    pub fn single(json: Value) -> Self {
        let mut columns = Vec::new();
        let mut row = Vec::new();
        if let Value::Object(map) = &json {
            for (k, v) in map {
                if let Some(c) = cell(v) {
                    columns.push(k.clone());
                    row.push(c);
                }
            }
        }
        Self { json, columns, rows: vec![row] }
    }

    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Json => Ok(serde_json::to_string_pretty(&self.json)? + "\n"),
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.columns)?;
                for r in &self.rows {
                    w.write_record(r)?;
                }
                let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
                Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
            }
            Format::Table => Ok(self.table()),
        }
    }

    fn table(&self) -> String {
        let mut out = String::new();
        if self.rows.len() == 1 {
            let width = self.columns.iter().map(|c| c.len()).max().unwrap_or(0);
            for (c, v) in self.columns.iter().zip(&self.rows[0]) {
                out.push_str(&format!("{c:<width$}  {v}\n"));
            }
            return out;
        }
        let widths: Vec<usize> = (0..self.columns.len())
            .map(|i| self.rows.iter().map(|r| r[i].len()).chain([self.columns[i].len()]).max().unwrap_or(0))
            .collect();
        let line = |cells: &[String]| {
            let parts: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
            parts.join("  ").trim_end().to_string() + "\n"
        };
        out.push_str(&line(&self.columns));
        for r in &self.rows {
            out.push_str(&line(r));
        }
        out
    }

    /// Table on stdout, plus `out` in `format` (inferred from the extension
    /// when absent). Without `out`, stdout gets `format` (default table).
    pub fn emit(&self, format: Option<Format>, out: Option<&Path>) -> Result<(), CliError> {
        match out {
            Some(path) => {
                let f = format.unwrap_or_else(|| match path.extension().and_then(|e| e.to_str()) {
                    Some("csv") => Format::Csv,
                    Some("txt") => Format::Table,
                    _ => Format::Json,
                });
                fs::write(path, self.render(f)?)?;
                print!("{}", self.table());
            }
            None => print!("{}", self.render(format.unwrap_or(Format::Table))?),
        }
        Ok(())
    }
}
