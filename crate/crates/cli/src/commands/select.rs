use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::Args;
use longsum::mcs::{inference_scores, recall_rate, McsModel, RecallReport};
use longsum::metrics::TokenSeq;
use longsum::selection::{
    aggressive_fraction, select, AggressiveReport, Document, Method, Selection, SelectionRecord,
};
use serde::{Deserialize, Serialize};

use super::{usage, BeamArgs};
use crate::io::{read_corpus, read_text, write_lines};
use crate::report::{self, failures_text, opt, RecordFailure, Report, ReportFormat};

#[derive(Args, Debug)]
pub struct SelectArgs {
    /// JSONL corpus.
    #[arg(long)]
    pub input: PathBuf,
    /// JSONL selections, one line per input line.
    #[arg(long)]
    pub output: PathBuf,
    /// trc, orc-no-pad, orc-pad-lead, orc-pad-rand or mcs.
    #[arg(long)]
    pub method: Method,
    /// Word budget.
    #[arg(long, default_value_t = 1024)]
    pub budget: usize,
    /// Seed for random padding.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// MCS checkpoint scored in process (mcs only).
    #[arg(long, conflicts_with = "scores")]
    pub checkpoint: Option<PathBuf>,
    /// Score dump written by `score` (mcs only).
    #[arg(long)]
    pub scores: Option<PathBuf>,
    /// Also write the statistics report to this file.
    #[arg(long)]
    pub stats: Option<PathBuf>,
    #[command(flatten)]
    pub beam: BeamArgs,
}

/// One line of a score dump.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScoreRow {
    pub id: String,
    pub sentence_index: usize,
    pub z_hat: f64,
    pub attn_mass: f64,
    pub fused: f64,
}

#[derive(Serialize)]
struct ErrorLine<'a> {
    line: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    id: Option<&'a str>,
    error: &'a str,
}

#[derive(Serialize)]
struct SelectStats {
    method: Method,
    budget: usize,
    seed: u64,
    records: usize,
    selected: usize,
    mean_words_used: Option<f64>,
    truncated: usize,
    /// Share of documents where the positive-overlap oracle stops short of the budget.
    agorc: Option<AggressiveReport>,
    /// Share of positive-overlap sentences kept, over documents with references.
    recall: Option<RecallReport>,
    failures: Vec<RecordFailure>,
}

impl Report for SelectStats {
    fn text(&self) -> String {
        let mut s = format!(
            "method: {}  budget: {}  seed: {}\nrecords: {}  selected: {}  failed: {}\n",
            self.method,
            self.budget,
            self.seed,
            self.records,
            self.selected,
            self.failures.len()
        );
        s.push_str(&format!("mean words used: {}\n", opt(self.mean_words_used, 2)));
        s.push_str(&format!("truncated first sentences: {}\n", self.truncated));
        s.push_str(&format!(
            "%AgORC: {}\n",
            opt(self.agorc.as_ref().filter(|a| a.counted > 0).map(|a| 100.0 * a.fraction), 2)
        ));
        s.push_str(&format!("%Recall: {}\n", opt(self.recall.as_ref().map(|r| r.percent), 2)));
        if !self.failures.is_empty() {
            s.push_str(&failures_text(&self.failures));
        }
        s
    }
}

/// Fused scores per document id, indexed by sentence.
fn load_scores(path: &Path) -> Result<BTreeMap<String, BTreeMap<usize, f64>>> {
    let mut out: BTreeMap<String, BTreeMap<usize, f64>> = BTreeMap::new();
    for (i, line) in read_text(path)?.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row: ScoreRow = serde_json::from_str(line)
            .with_context(|| format!("{}:{}: malformed score line", path.display(), i + 1))?;
        out.entry(row.id).or_default().insert(row.sentence_index, row.fused);
    }
    Ok(out)
}

enum Scorer {
    None,
    Model(McsModel),
    Dump(BTreeMap<String, BTreeMap<usize, f64>>),
}

impl Scorer {
    fn scores(&self, doc: &Document, beam: &BeamArgs) -> Result<Option<Vec<f64>>> {
        match self {
            Scorer::None => Ok(None),
            Scorer::Model(m) => {
                let (s, _) = inference_scores(m, doc, &beam.config(m.config.max_target))?;
                Ok(Some(s.fused))
            }
            Scorer::Dump(d) => {
                let rows = d
                    .get(&doc.id)
                    .ok_or_else(|| anyhow::anyhow!("no scores for `{}`", doc.id))?;
                (0..doc.num_sentences())
                    .map(|i| {
                        rows.get(&i)
                            .copied()
                            .ok_or_else(|| anyhow::anyhow!("no score for sentence {i} of `{}`", doc.id))
                    })
                    .collect::<Result<Vec<_>>>()
                    .map(Some)
            }
        }
    }
}

pub fn run(a: SelectArgs, fmt: ReportFormat, out: &mut dyn Write) -> Result<usize> {
    if a.budget == 0 {
        return usage("--budget must be at least 1");
    }
    let scorer = match (a.method, &a.checkpoint, &a.scores) {
        (Method::Mcs, Some(c), _) => Scorer::Model(McsModel::load(c).with_context(|| format!("loading {}", c.display()))?),
        (Method::Mcs, None, Some(s)) => Scorer::Dump(load_scores(s)?),
        (Method::Mcs, None, None) => return usage("--method mcs needs --checkpoint or --scores"),
        (_, c, s) => {
            if c.is_some() || s.is_some() {
                log::warn!("model scores are ignored by `{}`", a.method);
            }
            Scorer::None
        }
    };
    if let Scorer::Model(m) = &scorer {
        a.beam.config(m.config.max_target).validate()?;
    }

    let corpus = read_corpus(&a.input)?;
    let mut failures = corpus.failures;
    let mut lines: Vec<(usize, String)> = failures
        .iter()
        .map(|f| (f.line, serde_json::to_string(&ErrorLine { line: f.line, id: None, error: &f.error }).expect("serializable")))
        .collect();
    let mut done: Vec<(Document, Option<TokenSeq>, Selection)> = Vec::new();
    for (line, rec) in &corpus.records {
        let doc = &rec.document;
        let outcome = scorer.scores(doc, &a.beam).and_then(|scores| {
            Ok(select(doc, rec.reference.as_ref(), a.method, a.budget, a.seed, scores.as_deref())?)
        });
        match outcome {
            Ok(sel) => {
                let out = SelectionRecord::new(doc, &sel);
                lines.push((*line, serde_json::to_string(&out)?));
                done.push((doc.clone(), rec.reference.clone(), sel));
            }
            Err(e) => {
                log::warn!("{}:{line}: {e:#}", a.input.display());
                let f = RecordFailure::new(*line, Some(&doc.id), format!("{e:#}"));
                lines.push((*line, serde_json::to_string(&ErrorLine { line: *line, id: f.id.as_deref(), error: &f.error })?));
                failures.push(f);
            }
        }
    }
    lines.sort_by_key(|(l, _)| *l);
    failures.sort_by_key(|f| f.line);
    write_lines(&a.output, lines.into_iter().map(|(_, s)| s))?;

    let referenced: Vec<&(Document, Option<TokenSeq>, Selection)> =
        done.iter().filter(|(_, r, _)| r.is_some()).collect();
    let agorc = if referenced.is_empty() {
        None
    } else {
        let pairs: Vec<(Document, Option<TokenSeq>)> =
            referenced.iter().map(|(d, r, _)| (d.clone(), r.clone())).collect();
        Some(aggressive_fraction(&pairs, a.budget)?)
    };
    let sels: Vec<Selection> = referenced.iter().map(|(_, _, s)| s.clone()).collect();
    let docs: Vec<Document> = referenced.iter().map(|(d, _, _)| d.clone()).collect();
    let refs: Vec<TokenSeq> = referenced.iter().filter_map(|(_, r, _)| r.clone()).collect();
    let recall = recall_rate(&sels, &docs, &refs);
    let stats = SelectStats {
        method: a.method,
        budget: a.budget,
        seed: a.seed,
        records: corpus.records.len() + failures.iter().filter(|f| f.id.is_none()).count(),
        selected: done.len(),
        mean_words_used: (!done.is_empty())
            .then(|| done.iter().map(|(_, _, s)| s.words_used as f64).sum::<f64>() / done.len() as f64),
        truncated: done.iter().filter(|(_, _, s)| s.truncated).count(),
        agorc,
        recall,
        failures,
    };
    if let Some(p) = &a.stats {
        report::write(&stats, fmt, p)?;
    }
    report::print(out, &stats, fmt)?;
    Ok(stats.failures.len())
}
