//! Library behind the `longsum` binary: batch pipeline over JSONL corpora.
//!
//! Exit codes: 0 success, 1 when some records (or the run) failed, 2 for usage errors.

mod commands;
mod io;
mod report;

use std::io::Write;

use clap::{Parser, Subcommand};

use crate::report::ReportFormat;

#[derive(Parser)]
#[command(name = "longsum", version, about = "Local attention memory models and content selection for long-span summarization")]
struct Cli {
    /// Format of the report printed to stdout.
    #[arg(long, value_enum, global = true, default_value_t = ReportFormat::Text)]
    report: ReportFormat,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Predict training memory for one configuration.
    CostModel(commands::cost::CostArgs),
    /// Check a grid of (N, W) operating points against a memory budget.
    Advise(commands::cost::AdviseArgs),
    /// Fit cost-model coefficients to measured samples.
    FitCost(commands::fit::FitArgs),
    /// Select content from every document of a corpus.
    Select(commands::select::SelectArgs),
    /// Report mean attention distance per layer and head.
    AnalyzeAttention(commands::attention::AttentionArgs),
    /// Train a multitask content selection model.
    TrainMcs(commands::mcs::TrainArgs),
    /// Dump per-sentence MCS scores for a corpus.
    Score(commands::mcs::ScoreArgs),
    /// Corpus-mean ROUGE of candidates against references.
    Evaluate(commands::evaluate::EvaluateArgs),
    /// Write a seeded synthetic corpus with planted relevant sentences.
    GenerateCorpus(commands::corpus::GenerateArgs),
}

/// Rewrites `-N1` / `-N2` so they are not read as `-N 1` / `-N 2`.
fn normalize_args(args: impl IntoIterator<Item = String>) -> Vec<String> {
    args.into_iter()
        .map(|a| {
            for (short, long) in [("-N1", "--n1"), ("-N2", "--n2")] {
                if a == short {
                    return long.to_string();
                }
                if let Some(v) = a.strip_prefix(short).and_then(|r| r.strip_prefix('=')) {
                    return format!("{long}={v}");
                }
            }
            a
        })
        .collect()
}

/// Parses `args` (program name first), runs the command with its report
/// written to `out`, and returns the process exit code.
pub fn run(args: impl IntoIterator<Item = String>, out: &mut dyn Write) -> u8 {
    let cli = match Cli::try_parse_from(normalize_args(args)) {
        Ok(c) => c,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return 2;
        }
        Err(e) => {
            let _ = write!(out, "{}", e.render());
            return 0;
        }
    };
    let fmt = cli.report;
    let result = match cli.command {
        Command::CostModel(a) => commands::cost::run(a, fmt, out),
        Command::Advise(a) => commands::cost::run_advise(a, fmt, out),
        Command::FitCost(a) => commands::fit::run(a, fmt, out),
        Command::Select(a) => commands::select::run(a, fmt, out),
        Command::AnalyzeAttention(a) => commands::attention::run(a, fmt, out),
        Command::TrainMcs(a) => commands::mcs::run_train(a, fmt, out),
        Command::Score(a) => commands::mcs::run_score(a, fmt, out),
        Command::Evaluate(a) => commands::evaluate::run(a, fmt, out),
        Command::GenerateCorpus(a) => commands::corpus::run(a, fmt, out),
    };
    match result {
        Ok(0) => 0,
        Ok(failures) => {
            eprintln!("longsum: {failures} record(s) failed");
            1
        }
        Err(e) => {
            eprintln!("longsum: {e:#}");
            commands::exit_code(&e)
        }
    }
}
