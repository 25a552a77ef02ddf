//! Tabular output with a self-describing comment header.
//!
//! CSV layout:
//!
//! ```text
//! # unravel 0.1.0
//! # command: figure 1
//! # warning: ...            (zero or more)
//! # --- config ---
//! # <resolved configuration, TOML>
//! # --- end config ---
//! eta,gamma_fun,H_ss,divergent,status
//! 0.01,0.01,12.3,false,ok
//! ```
//!
//! Feeding the lines between the config markers (with the `# ` prefix
//! removed) back through `--config` reproduces the file byte for byte.
//! Non-finite numbers are written as empty fields.

use std::fmt::Write as _;
use std::path::Path;

use clap::ValueEnum;
use serde_json::{json, Value};

use crate::error::{CliError, Result};

pub const TOOL_NAME: &str = "unravel";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const CONFIG_BEGIN: &str = "# --- config ---";
pub const CONFIG_END: &str = "# --- end config ---";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(u64),
    Bool(bool),
    Text(String),
    Empty,
}

impl Cell {
    pub fn text(s: impl Into<String>) -> Self {
        Cell::Text(s.into())
    }

    pub fn opt_float(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Float)
    }

    pub fn opt_int(v: Option<u64>) -> Self {
        v.map_or(Cell::Empty, Cell::Int)
    }

    fn csv(&self) -> String {
        match self {
            Cell::Float(v) => format_float(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Float(v) if v.is_finite() => json!(v),
            Cell::Float(_) | Cell::Empty => Value::Null,
            Cell::Int(v) => json!(v),
            Cell::Bool(b) => json!(b),
            Cell::Text(s) => json!(s),
        }
    }
}

/// Shortest representation that parses back to the same `f64`; exponent
/// notation outside `[1e-4, 1e15)`, empty for non-finite values.
pub fn format_float(v: f64) -> String {
    if !v.is_finite() {
        return String::new();
    }
    let a = v.abs();
    if a == 0.0 || (1e-4..1e15).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }
}

/// A table plus the provenance written in front of it.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: String,
    pub warnings: Vec<String>,
    /// Resolved configuration as a TOML document.
    pub config: String,
    pub table: Table,
}

impl Report {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# {TOOL_NAME} {TOOL_VERSION}").unwrap();
        writeln!(out, "# command: {}", self.command).unwrap();
        for w in &self.warnings {
            writeln!(out, "# warning: {w}").unwrap();
        }
        writeln!(out, "{CONFIG_BEGIN}").unwrap();
        for line in self.config.lines() {
            if line.is_empty() {
                out.push_str("#\n");
            } else {
                writeln!(out, "# {line}").unwrap();
            }
        }
        writeln!(out, "{CONFIG_END}").unwrap();
        out.push_str(&self.table.columns.join(","));
        out.push('\n');
        for row in &self.table.rows {
            let fields: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<Value> = self
            .table
            .rows
            .iter()
            .map(|r| Value::Array(r.iter().map(Cell::json).collect()))
            .collect();
        let doc = json!({
            "tool": TOOL_NAME,
            "version": TOOL_VERSION,
            "command": self.command,
            "warnings": self.warnings,
            "config": self.config,
            "columns": self.table.columns,
            "rows": rows,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
        s.push('\n');
        s
    }

    /// Writes to `path`, or to stdout when `path` is `None`.
    pub fn emit(&self, path: Option<&Path>, format: Format) -> Result<()> {
        write_text(path, &self.render(format))
    }
}

pub fn write_text(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| CliError::Io {
            path: p.display().to_string(),
            source,
        }),
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Io {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}

/// Recovers the embedded configuration from a CSV file written by
/// [`Report::to_csv`].
pub fn extract_config(csv: &str) -> Option<String> {
    let mut lines = csv.lines().skip_while(|l| *l != CONFIG_BEGIN);
    lines.next()?;
    let mut out = String::new();
    for line in lines {
        if line == CONFIG_END {
            return Some(out);
        }
        let body = line.strip_prefix("# ").or_else(|| line.strip_prefix('#'))?;
        out.push_str(body);
        out.push('\n');
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut table = Table::new(&["x", "h", "divergent", "status"]);
        table.push(vec![
            Cell::Float(0.5),
            Cell::Float(227.388),
            Cell::Bool(false),
            Cell::text("ok"),
        ]);
        table.push(vec![
            Cell::Float(1.0),
            Cell::Float(f64::INFINITY),
            Cell::Bool(true),
            Cell::text("divergent"),
        ]);
        Report {
            command: "test".into(),
            warnings: vec!["careful".into()],
            config: "eta = 1.0\n\n[figure]\netas = [0.5]\n".into(),
            table,
        }
    }

    #[test]
    fn float_format_round_trips() {
        for v in [0.0, 1.0, -2.5, 1e-10, 123456.789, 6.02e23, 1.0 / 3.0, 848230.0164650513] {
            let s = format_float(v);
            assert_eq!(s.parse::<f64>().unwrap(), v, "{s}");
        }
        assert_eq!(format_float(1e-10), "1e-10");
        assert_eq!(format_float(0.25), "0.25");
        assert_eq!(format_float(f64::NAN), "");
    }

    #[test]
    fn csv_layout() {
        let csv = sample().to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], format!("# unravel {TOOL_VERSION}"));
        assert_eq!(lines[2], "# warning: careful");
        assert_eq!(lines[8], CONFIG_END);
        assert_eq!(lines[9], "x,h,divergent,status");
        assert_eq!(lines[11], "1,,true,divergent");
        assert!(!csv.contains("inf"));
        assert_eq!(extract_config(&csv).unwrap(), sample().config);
    }

    #[test]
    fn json_uses_null_for_divergent() {
        let v: Value = serde_json::from_str(&sample().to_json()).unwrap();
        assert_eq!(v["rows"][1][1], Value::Null);
        assert_eq!(v["columns"][0], "x");
        assert_eq!(v["config"], sample().config);
    }
}
