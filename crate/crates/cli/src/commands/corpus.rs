use std::io::Write;
use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use longsum::synthetic::{generate, SyntheticConfig};
use serde::Serialize;

use crate::io::{write_jsonl, write_lines};
use crate::report::{self, Report, ReportFormat};

#[derive(Args, Debug)]
pub struct GenerateArgs {
    /// Number of documents.
    #[arg(long, default_value_t = 20)]
    pub docs: usize,
    /// Generator seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// JSONL corpus to write.
    #[arg(long)]
    pub output: PathBuf,
    /// Also write the planted relevant sentence indices per document.
    #[arg(long)]
    pub truth: Option<PathBuf>,
}

#[derive(Serialize)]
struct TruthRow<'a> {
    id: &'a str,
    relevant: &'a [usize],
}

#[derive(Serialize)]
struct CorpusReport {
    config: SyntheticConfig,
    seed: u64,
    documents: usize,
    sentences: usize,
    relevant: usize,
}

impl Report for CorpusReport {
    fn text(&self) -> String {
        format!(
            "documents: {}\nsentences: {}\nplanted relevant sentences: {}\nseed: {}\n",
            self.documents, self.sentences, self.relevant, self.seed
        )
    }
}

pub fn run(a: GenerateArgs, fmt: ReportFormat, out: &mut dyn Write) -> Result<usize> {
    let config = SyntheticConfig {
        docs: a.docs,
        ..SyntheticConfig::default()
    };
    let docs = generate(&config, a.seed)?;
    write_lines(&a.output, docs.iter().map(|d| d.record.to_line()))?;
    if let Some(t) = &a.truth {
        write_jsonl(
            t,
            docs.iter().map(|d| TruthRow {
                id: &d.document().id,
                relevant: &d.relevant,
            }),
        )?;
    }
    let report = CorpusReport {
        config,
        seed: a.seed,
        documents: docs.len(),
        sentences: docs.iter().map(|d| d.document().num_sentences()).sum(),
        relevant: docs.iter().map(|d| d.relevant.len()).sum(),
    };
    report::print(out, &report, fmt)?;
    Ok(0)
}
