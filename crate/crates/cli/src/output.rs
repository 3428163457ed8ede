use std::fs;
use std::io::{self, Write};
use std::path::Path;

use anyhow::{Context, Result};
use clap::ValueEnum;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Rows with a header; cells are already formatted.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Table {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.into_inner().context("flushing csv")
    }
}

/// What a subcommand produced. `negative` carries the message for exit code 3.
pub struct Report {
    pub json: Value,
    pub table: Table,
    pub default_format: Format,
    pub negative: Option<String>,
}

impl Report {
    pub fn json(json: Value, table: Table) -> Report {
        Report { json, table, default_format: Format::Json, negative: None }
    }

    pub fn csv(json: Value, table: Table) -> Report {
        Report { json, table, default_format: Format::Csv, negative: None }
    }

    pub fn render(&self, format: Option<Format>) -> Result<Vec<u8>> {
        match format.unwrap_or(self.default_format) {
            Format::Json => {
                let mut out = serde_json::to_vec_pretty(&self.json)?;
                out.push(b'\n');
                Ok(out)
            }
            Format::Csv => self.table.to_csv(),
        }
    }
}

pub fn write(bytes: &[u8], out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => fs::write(p, bytes).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
            Ok(())
        }
    }
}

/// Shortest round-trip decimal, with an exponent for very small or large values.
pub fn num(v: f64) -> String {
    if v.is_finite() {
        Value::from(v + 0.0).to_string()
    } else {
        format!("{v}")
    }
}

pub fn joined<T: ToString>(v: &[T]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}
