//! JSON and CSV rendering of command reports.

use std::io::Write;

use serde_json::{json, Map, Value};

use crate::config::{Format, RunConfig};
use crate::error::Result;

pub const SCHEMA_VERSION: u32 = 1;

/// A command's table plus summary record.
#[derive(Clone, Debug)]
pub struct Report {
    pub command: String,
    /// Column order for CSV; every row carries these keys.
    pub columns: Vec<&'static str>,
    pub rows: Vec<Map<String, Value>>,
    pub footer: Map<String, Value>,
    /// False when any verification row failed.
    pub passed: bool,
}

impl Report {
    pub fn new(command: impl Into<String>, columns: Vec<&'static str>) -> Self {
        Self {
            command: command.into(),
            columns,
            rows: Vec::new(),
            footer: Map::new(),
            passed: true,
        }
    }

    /// Appends a row given as `(column, value)` pairs in column order.
    pub fn push_row(&mut self, cells: Vec<(&'static str, Value)>) {
        debug_assert_eq!(
            cells.iter().map(|(k, _)| *k).collect::<Vec<_>>(),
            self.columns,
            "row cells must follow the column order"
        );
        self.rows
            .push(cells.into_iter().map(|(k, v)| (k.to_string(), v)).collect());
    }

    pub fn footer_entry(&mut self, key: &str, value: Value) {
        self.footer.insert(key.to_string(), value);
    }
}

/// `f64` as a JSON number; non-finite values become `null`.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

pub fn render_json(report: &Report, config: &RunConfig) -> Result<String> {
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "command": report.command,
        "config": serde_json::to_value(config).expect("config serializes"),
        "rows": report.rows,
        "footer": report.footer,
    });
    let mut text = serde_json::to_string_pretty(&doc).expect("report serializes");
    text.push('\n');
    Ok(text)
}

/// Floats with 17 significant digits, integers and booleans verbatim,
/// `null` as an empty field.
pub fn csv_cell(value: &Value) -> String {
    match value {
        Value::Null => String::new(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                i.to_string()
            } else if let Some(u) = n.as_u64() {
                u.to_string()
            } else {
                format!("{:.16e}", n.as_f64().expect("finite number"))
            }
        }
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Rows only, header first. The footer is a JSON-only record.
pub fn render_csv(report: &Report) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(&report.columns).map_err(csv_io)?;
    for row in &report.rows {
        let record: Vec<String> = report
            .columns
            .iter()
            .map(|c| csv_cell(row.get(*c).unwrap_or(&Value::Null)))
            .collect();
        writer.write_record(&record).map_err(csv_io)?;
    }
    let bytes = writer.into_inner().map_err(|e| std::io::Error::other(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn csv_io(e: csv::Error) -> std::io::Error {
    std::io::Error::other(e.to_string())
}

pub fn render(report: &Report, config: &RunConfig) -> Result<String> {
    match config.format {
        Format::Json => render_json(report, config),
        Format::Csv => render_csv(report),
    }
}

/// Writes to `config.out` when set, otherwise to `stdout`.
pub fn emit(report: &Report, config: &RunConfig, stdout: &mut dyn Write) -> Result<()> {
    let text = render(report, config)?;
    match &config.out {
        Some(path) => std::fs::write(path, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}
