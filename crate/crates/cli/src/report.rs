use std::fmt::Write as _;

use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Tsv,
}

/// Outcome of a subcommand: what to print and how to exit.
pub struct Report {
    pub command: &'static str,
    pub config: Value,
    pub result: Value,
    /// Tabular projection of `result`.
    pub table: Table,
    pub exit: u8,
}

#[derive(Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Table {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    /// Two-column `key value` table.
    pub fn pairs(pairs: impl IntoIterator<Item = (&'static str, String)>) -> Self {
        let mut t = Table::new(&["key", "value"]);
        for (k, v) in pairs {
            t.push(vec![k.to_string(), v]);
        }
        t
    }
}

pub fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Json => {
            let doc = json!({
                "tool": "locality",
                "version": env!("CARGO_PKG_VERSION"),
                "command": report.command,
                "config": report.config,
                "result": report.result,
            });
            let mut text = serde_json::to_string_pretty(&doc).expect("report serializes");
            text.push('\n');
            text
        }
        Format::Tsv => {
            let mut out = String::new();
            writeln!(out, "# locality {} {}", env!("CARGO_PKG_VERSION"), report.command).unwrap();
            writeln!(out, "# config {}", report.config).unwrap();
            writeln!(out, "{}", report.table.header.join("\t")).unwrap();
            for row in &report.table.rows {
                writeln!(out, "{}", row.join("\t")).unwrap();
            }
            out
        }
    }
}
