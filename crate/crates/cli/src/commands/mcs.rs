use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::Args;
use longsum::mcs::{inference_scores, train, LossPoint, McsConfig, McsExample, McsModel, TrainConfig, Vocab};
use longsum::optim::AdamConfig;
use longsum::selection::CorpusRecord;
use serde::Serialize;

use super::select::ScoreRow;
use super::{usage, BeamArgs};
use crate::io::{read_corpus, write_jsonl, Corpus};
use crate::report::{self, failures_text, RecordFailure, Report, ReportFormat};

#[derive(Args, Debug)]
pub struct TrainArgs {
    /// JSONL training corpus; every record needs a reference.
    #[arg(long)]
    pub input: PathBuf,
    /// Optional JSONL validation corpus for early stopping.
    #[arg(long)]
    pub valid: Option<PathBuf>,
    /// Checkpoint to write.
    #[arg(long)]
    pub output: PathBuf,
    /// Write the per-step loss curve as JSONL.
    #[arg(long)]
    pub curve: Option<PathBuf>,
    /// Vocabulary cap, special tokens included.
    #[arg(long, default_value_t = 10_000)]
    pub vocab_size: usize,
    #[arg(long, default_value_t = McsConfig::default().embed)]
    pub embed: usize,
    #[arg(long, default_value_t = McsConfig::default().hidden)]
    pub hidden: usize,
    #[arg(long, default_value_t = McsConfig::default().word_layers)]
    pub word_layers: usize,
    #[arg(long, default_value_t = McsConfig::default().sent_layers)]
    pub sent_layers: usize,
    #[arg(long, default_value_t = McsConfig::default().dec_layers)]
    pub dec_layers: usize,
    #[arg(long, default_value_t = McsConfig::default().dropout)]
    pub dropout: f64,
    /// Sentences kept per document.
    #[arg(long, default_value_t = McsConfig::default().max_sentences)]
    pub max_sentences: usize,
    /// Words kept per sentence.
    #[arg(long, default_value_t = McsConfig::default().max_words)]
    pub max_words: usize,
    /// Target tokens kept per reference, end token included.
    #[arg(long, default_value_t = McsConfig::default().max_target)]
    pub max_target: usize,
    /// Weight of the sentence-labelling loss; the rest goes to the summary loss.
    #[arg(long, default_value_t = TrainConfig::default().gamma)]
    pub gamma: f64,
    #[arg(long, default_value_t = TrainConfig::default().steps)]
    pub steps: u64,
    #[arg(long, default_value_t = TrainConfig::default().batch_size)]
    pub batch_size: usize,
    /// Warmup steps of the inverse-square-root schedule.
    #[arg(long, default_value_t = TrainConfig::default().warmup)]
    pub warmup: u64,
    /// Learning-rate multiplier of the schedule.
    #[arg(long, default_value_t = TrainConfig::default().lr_scale)]
    pub lr_scale: f64,
    /// Validation checks without improvement before stopping (0 disables).
    #[arg(long, default_value_t = TrainConfig::default().patience)]
    pub patience: usize,
    #[arg(long, default_value_t = TrainConfig::default().eval_every)]
    pub eval_every: u64,
    /// Seed for initialization, batching and dropout.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Serialize)]
struct TrainSummary {
    examples: usize,
    validation_examples: usize,
    vocab: usize,
    parameters: usize,
    config: McsConfig,
    train: TrainConfig,
    steps_run: u64,
    first_loss: Option<f64>,
    last_loss: Option<f64>,
    best_step: u64,
    stopped_early: bool,
    validation: Vec<LossPoint>,
    failures: Vec<RecordFailure>,
}

impl Report for TrainSummary {
    fn text(&self) -> String {
        let mut s = format!(
            "examples: {} (validation {})\nvocab: {}  parameters: {}\n",
            self.examples, self.validation_examples, self.vocab, self.parameters
        );
        s.push_str(&format!(
            "steps: {}  loss {} -> {}\n",
            self.steps_run,
            report::opt(self.first_loss, 4),
            report::opt(self.last_loss, 4)
        ));
        if self.stopped_early {
            s.push_str("stopped early\n");
        }
        s.push_str(&format!("kept parameters from step {}\n", self.best_step));
        if !self.failures.is_empty() {
            s.push_str(&format!("failures: {}\n{}", self.failures.len(), failures_text(&self.failures)));
        }
        s
    }
}

fn examples(model: &McsModel, corpus: &Corpus, failures: &mut Vec<RecordFailure>) -> Vec<McsExample> {
    let mut out = Vec::new();
    for (line, rec) in &corpus.records {
        let id = Some(rec.document.id.as_str());
        let Some(reference) = &rec.reference else {
            failures.push(RecordFailure::new(*line, id, "no reference"));
            continue;
        };
        match model.example(&rec.document, reference) {
            Ok(ex) => out.push(ex),
            Err(e) => failures.push(RecordFailure::new(*line, id, e)),
        }
    }
    out
}

fn build_vocab(records: &[(usize, CorpusRecord)], max_size: usize) -> Result<Vocab> {
    let texts = records
        .iter()
        .flat_map(|(_, r)| r.document.sentences.iter().chain(r.reference.iter()));
    Ok(Vocab::build(texts, max_size)?)
}

pub fn run_train(a: TrainArgs, fmt: ReportFormat, out: &mut dyn Write) -> Result<usize> {
    let corpus = read_corpus(&a.input)?;
    let mut failures = corpus.failures.clone();
    if corpus.records.is_empty() {
        return usage(format!("{} holds no usable records", a.input.display()));
    }
    let vocab = build_vocab(&corpus.records, a.vocab_size)?;
    let config = McsConfig {
        vocab: vocab.len(),
        embed: a.embed,
        hidden: a.hidden,
        word_layers: a.word_layers,
        sent_layers: a.sent_layers,
        dec_layers: a.dec_layers,
        dropout: a.dropout,
        gamma: a.gamma,
        max_sentences: a.max_sentences,
        max_words: a.max_words,
        max_target: a.max_target,
    };
    let mut model = McsModel::new(config, vocab, a.seed)?;
    let train_set = examples(&model, &corpus, &mut failures);
    let valid_set = match &a.valid {
        Some(p) => {
            let v = read_corpus(p)?;
            let mut vf = v.failures.clone();
            let set = examples(&model, &v, &mut vf);
            for f in &vf {
                log::warn!("{}:{}: {}", p.display(), f.line, f.error);
            }
            set
        }
        None => Vec::new(),
    };
    let cfg = TrainConfig {
        steps: a.steps,
        batch_size: a.batch_size,
        warmup: a.warmup,
        lr_scale: a.lr_scale,
        gamma: a.gamma,
        patience: a.patience,
        eval_every: a.eval_every,
        seed: a.seed,
        adam: AdamConfig::default(),
    };
    let rep = train(&mut model, &train_set, &valid_set, &cfg)?;
    model.save(&a.output).with_context(|| format!("writing {}", a.output.display()))?;
    if let Some(c) = &a.curve {
        write_jsonl(c, &rep.curve)?;
    }
    failures.sort_by_key(|f| f.line);
    let summary = TrainSummary {
        examples: train_set.len(),
        validation_examples: valid_set.len(),
        vocab: model.vocab.len(),
        parameters: model.params.num_values(),
        config: model.config.clone(),
        train: cfg,
        steps_run: rep.steps_run,
        first_loss: rep.curve.first().map(|p| p.loss),
        last_loss: rep.curve.last().map(|p| p.loss),
        best_step: rep.best_step,
        stopped_early: rep.stopped_early,
        validation: rep.validation,
        failures,
    };
    report::print(out, &summary, fmt)?;
    Ok(summary.failures.len())
}

#[derive(Args, Debug)]
pub struct ScoreArgs {
    /// JSONL corpus.
    #[arg(long)]
    pub input: PathBuf,
    /// MCS checkpoint written by `train-mcs`.
    #[arg(long)]
    pub checkpoint: PathBuf,
    /// JSONL score dump, one line per sentence.
    #[arg(long)]
    pub output: PathBuf,
    #[command(flatten)]
    pub beam: BeamArgs,
}

#[derive(Serialize)]
struct ScoreSummary {
    documents: usize,
    sentences: usize,
    failures: Vec<RecordFailure>,
}

impl Report for ScoreSummary {
    fn text(&self) -> String {
        let mut s = format!("documents: {}\nsentences scored: {}\n", self.documents, self.sentences);
        if !self.failures.is_empty() {
            s.push_str(&format!("failures: {}\n{}", self.failures.len(), failures_text(&self.failures)));
        }
        s
    }
}

fn load_model(path: &Path) -> Result<McsModel> {
    McsModel::load(path).with_context(|| format!("loading {}", path.display()))
}

pub fn run_score(a: ScoreArgs, fmt: ReportFormat, out: &mut dyn Write) -> Result<usize> {
    let model = load_model(&a.checkpoint)?;
    let beam = a.beam.config(model.config.max_target);
    beam.validate()?;
    let corpus = read_corpus(&a.input)?;
    let mut failures = corpus.failures.clone();
    let mut rows = Vec::new();
    let mut documents = 0;
    for (line, rec) in &corpus.records {
        let doc = &rec.document;
        match inference_scores(&model, doc, &beam) {
            Ok((s, _)) => {
                documents += 1;
                for i in 0..doc.num_sentences() {
                    rows.push(ScoreRow {
                        id: doc.id.clone(),
                        sentence_index: i,
                        z_hat: s.z_hat[i],
                        attn_mass: s.attn_mass[i],
                        fused: s.fused[i],
                    });
                }
            }
            Err(e) => failures.push(RecordFailure::new(*line, Some(&doc.id), e)),
        }
    }
    write_jsonl(&a.output, &rows)?;
    failures.sort_by_key(|f| f.line);
    let summary = ScoreSummary {
        documents,
        sentences: rows.len(),
        failures,
    };
    report::print(out, &summary, fmt)?;
    Ok(summary.failures.len())
}
