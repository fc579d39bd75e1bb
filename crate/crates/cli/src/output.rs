//! Output envelope and its JSON / CSV renderings.

use std::time::Duration;

use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// A flat table; the CSV rendering of every command.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Option<String>>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Option<String>>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Debug, Serialize)]
pub struct Metadata {
    pub version: &'static str,
    pub command: &'static str,
    pub instance: Value,
    pub tolerances: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<String>,
}

/// Result of one command: structured payload for JSON, table for CSV.
pub struct Output {
    pub command: &'static str,
    pub instance: Value,
    pub tolerances: Value,
    pub payload: Value,
    pub table: Table,
    /// Exit status 1 when a verification failed.
    pub failed: bool,
}

#[derive(Serialize)]
struct Envelope<'a> {
    metadata: Metadata,
    payload: &'a Value,
}

pub fn render(out: &Output, format: Format, timing: Option<Duration>) -> anyhow::Result<String> {
    match format {
        Format::Json => {
            let envelope = Envelope {
                metadata: Metadata {
                    version: env!("CARGO_PKG_VERSION"),
                    command: out.command,
                    instance: out.instance.clone(),
                    tolerances: out.tolerances.clone(),
                    timing_ms: timing.map(|d| format!("{:.3}", d.as_secs_f64() * 1e3)),
                },
                payload: &out.payload,
            };
            let mut s = serde_json::to_string_pretty(&envelope)?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => {
            let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
            w.write_record(&out.table.columns)?;
            for row in &out.table.rows {
                w.write_record(row.iter().map(|c| c.as_deref().unwrap_or("")))?;
            }
            Ok(String::from_utf8(w.into_inner()?)?)
        }
    }
}
