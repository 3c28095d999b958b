use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use longsum::selection::{parse_corpus, CorpusRecord};
use serde::Serialize;

use crate::report::RecordFailure;

/// A parsed corpus: good records with their line numbers, and the lines that failed.
pub struct Corpus {
    pub records: Vec<(usize, CorpusRecord)>,
    pub failures: Vec<RecordFailure>,
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

pub fn read_corpus(path: &Path) -> Result<Corpus> {
    let text = read_text(path)?;
    let mut records = Vec::new();
    let mut failures = Vec::new();
    for (line, parsed) in parse_corpus(&text) {
        match parsed {
            Ok(r) => records.push((line, r)),
            Err(e) => {
                log::warn!("{}:{line}: {e}", path.display());
                failures.push(RecordFailure::new(line, None, e));
            }
        }
    }
    Ok(Corpus { records, failures })
}

/// Writes one JSON value per line.
pub fn write_jsonl<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>) -> Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(file);
    for row in rows {
        serde_json::to_writer(&mut w, &row)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

/// Writes pre-rendered lines.
pub fn write_lines(path: &Path, lines: impl IntoIterator<Item = String>) -> Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(file);
    for line in lines {
        w.write_all(line.as_bytes())?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}
