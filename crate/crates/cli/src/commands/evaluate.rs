use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Result};
use clap::Args;
use longsum::metrics::{rouge_suite, tokenize, RougeScore, RougeSuite, TokenSeq};
use serde::Serialize;
use serde_json::Value;

use crate::io::read_text;
use crate::report::{self, failures_text, RecordFailure, Report, ReportFormat};

#[derive(Args, Debug)]
pub struct EvaluateArgs {
    /// JSONL candidates (selections or summaries).
    #[arg(long)]
    pub candidates: PathBuf,
    /// JSONL references, matched to candidates by `id`.
    #[arg(long)]
    pub references: PathBuf,
}

#[derive(Serialize)]
struct EvaluateReport {
    documents: usize,
    rouge1: RougeScore,
    rouge2: RougeScore,
    rouge_l: RougeScore,
    failures: Vec<RecordFailure>,
}

impl Report for EvaluateReport {
    fn text(&self) -> String {
        let mut s = format!("documents: {}\n", self.documents);
        s.push_str(&format!("  {:<8} {:>9} {:>9} {:>9}\n", "", "P", "R", "F1"));
        for (name, r) in [("ROUGE-1", &self.rouge1), ("ROUGE-2", &self.rouge2), ("ROUGE-L", &self.rouge_l)] {
            s.push_str(&format!("  {name:<8} {:>9.4} {:>9.4} {:>9.4}\n", r.precision, r.recall, r.f1));
        }
        if !self.failures.is_empty() {
            s.push_str(&format!("failures: {}\n{}", self.failures.len(), failures_text(&self.failures)));
        }
        s
    }
}

fn text_of(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.clone()),
        Value::Array(items) => {
            let parts: Option<Vec<String>> = items.iter().map(text_of).collect();
            Some(parts?.join(" "))
        }
        _ => None,
    }
}

/// The evaluated text of a record: `summary`, else `reference`, else all `sentences`.
fn record_text(v: &Value) -> Option<TokenSeq> {
    ["summary", "reference", "sentences"]
        .iter()
        .find_map(|k| v.get(k).and_then(text_of))
        .map(|t| tokenize(&t))
}

fn record_id(v: &Value) -> Option<String> {
    match v.get("id")? {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        _ => None,
    }
}

type Keyed = Vec<(usize, Result<(String, TokenSeq)>)>;

fn read_keyed(path: &Path) -> Result<Keyed> {
    Ok(read_text(path)?
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            let parsed = serde_json::from_str::<Value>(l).map_err(anyhow::Error::from).and_then(|v| {
                let id = record_id(&v).ok_or_else(|| anyhow!("missing `id`"))?;
                let text = record_text(&v).ok_or_else(|| anyhow!("`{id}` has no summary, reference or sentences"))?;
                Ok((id, text))
            });
            (i + 1, parsed)
        })
        .collect())
}

fn mean(scores: &[RougeScore]) -> RougeScore {
    let n = scores.len().max(1) as f64;
    RougeScore {
        precision: scores.iter().map(|s| s.precision).sum::<f64>() / n,
        recall: scores.iter().map(|s| s.recall).sum::<f64>() / n,
        f1: scores.iter().map(|s| s.f1).sum::<f64>() / n,
    }
}

pub fn run(a: EvaluateArgs, fmt: ReportFormat, out: &mut dyn Write) -> Result<usize> {
    let mut failures = Vec::new();
    let mut refs: BTreeMap<String, TokenSeq> = BTreeMap::new();
    for (line, r) in read_keyed(&a.references)? {
        match r {
            Ok((id, text)) => {
                if refs.insert(id.clone(), text).is_some() {
                    log::warn!("duplicate reference `{id}`; the last one wins");
                }
            }
            Err(e) => failures.push(RecordFailure::new(line, None, format!("references: {e}"))),
        }
    }
    let mut suites: Vec<RougeSuite> = Vec::new();
    for (line, c) in read_keyed(&a.candidates)? {
        match c {
            Ok((id, cand)) => match refs.get(&id) {
                Some(r) => suites.push(rouge_suite(cand.tokens(), r.tokens())),
                None => failures.push(RecordFailure::new(line, Some(&id), "no reference with this id")),
            },
            Err(e) => failures.push(RecordFailure::new(line, None, format!("candidates: {e}"))),
        }
    }
    let pick = |f: fn(&RougeSuite) -> RougeScore| mean(&suites.iter().map(f).collect::<Vec<_>>());
    let report = EvaluateReport {
        documents: suites.len(),
        rouge1: pick(|s| s.rouge1),
        rouge2: pick(|s| s.rouge2),
        rouge_l: pick(|s| s.rouge_l),
        failures,
    };
    report::print(out, &report, fmt)?;
    Ok(report.failures.len())
}
