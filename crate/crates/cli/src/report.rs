use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use clap::ValueEnum;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Json,
    Text,
}

/// A command summary with a JSON schema (its serde form) and a text rendering.
pub trait Report: Serialize {
    fn text(&self) -> String;
}

pub fn render<R: Report>(report: &R, fmt: ReportFormat) -> String {
    match fmt {
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
            s.push('\n');
            s
        }
        ReportFormat::Text => report.text(),
    }
}

pub fn print<R: Report>(out: &mut dyn Write, report: &R, fmt: ReportFormat) -> Result<()> {
    out.write_all(render(report, fmt).as_bytes())?;
    out.flush()?;
    Ok(())
}

pub fn write<R: Report>(report: &R, fmt: ReportFormat, path: &Path) -> Result<()> {
    std::fs::write(path, render(report, fmt)).with_context(|| format!("writing {}", path.display()))
}

/// A record that could not be processed, keyed by its input line.
#[derive(Clone, Debug, Serialize)]
pub struct RecordFailure {
    pub line: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub error: String,
}

impl RecordFailure {
    pub fn new(line: usize, id: Option<&str>, error: impl std::fmt::Display) -> Self {
        RecordFailure {
            line,
            id: id.map(str::to_string),
            error: error.to_string(),
        }
    }
}

pub fn failures_text(failures: &[RecordFailure]) -> String {
    let mut s = String::new();
    for f in failures {
        match &f.id {
            Some(id) => s.push_str(&format!("  line {} (`{id}`): {}\n", f.line, f.error)),
            None => s.push_str(&format!("  line {}: {}\n", f.line, f.error)),
        }
    }
    s
}

/// `Some(x)` as a fixed-precision string, `None` as `n/a`.
pub fn opt(x: Option<f64>, digits: usize) -> String {
    x.map_or_else(|| "n/a".to_string(), |v| format!("{v:.digits$}"))
}
