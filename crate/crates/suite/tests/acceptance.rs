//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::path::Path;
use std::time::Instant;

use common::*;
use longsum::attention::{mean_attention_distance, uniform_distance, uniform_map};
use longsum::costmodel::{bart_memory, breakeven_width, hier_rnn_memory, CostCoefficients};
use longsum::mcs::{McsConfig, McsScores};
use longsum::numerics::Tensor;
use longsum::optim::learning_rate;
use longsum::selection::aggressive_fraction;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(checks: Vec<(bool, String)>) -> Outcome {
    let pass = checks.iter().all(|(ok, _)| *ok);
    let detail = checks
        .into_iter()
        .map(|(ok, d)| if ok { d } else { format!("{d} [off]") })
        .collect::<Vec<_>>()
        .join("; ");
    Outcome { pass, detail }
}

fn cost_model_fidelity() -> Outcome {
    let bart = CostCoefficients::bart_default();
    let lobart = CostCoefficients::lobart_default();
    let profile = bart_memory(1024, 144, 1, &bart).unwrap();
    let worst_term = BART_PROFILE
        .iter()
        .map(|&(name, want)| (profile.term(name).unwrap() - want).abs())
        .fold(0.0, f64::max);
    let gaps = memory_table_gaps();
    let off: Vec<String> = gaps
        .iter()
        .filter(|(_, _, g)| g.abs() > 0.15)
        .map(|(label, total, gap)| format!("{label} predicts {total:.2} ({gap:+.2})"))
        .collect();
    let hier = hier_rnn_memory(1000, 50, 1, &CostCoefficients::hier_default()).unwrap().total;
    let ratio = breakeven_width(1, &bart, &lobart).unwrap();
    outcome(vec![
        (worst_term <= 0.01, format!("profile terms within {worst_term:.4} GiB")),
        ((profile.total - 8.88).abs() <= 0.05, format!("total {:.3} GiB", profile.total)),
        (
            off.is_empty(),
            format!("{}/13 table rows within 0.15 GiB{}", 13 - off.len(), if off.is_empty() { String::new() } else { format!(", {}", off.join(", ")) }),
        ),
        (format!("{hier:.2}") == "2.53", format!("hier {hier:.4} GiB")),
        ((ratio - 0.582).abs() <= 0.001, format!("break-even ratio {ratio:.4}")),
    ])
}

fn mean_distance_fidelity() -> Outcome {
    let d_u = mean_attention_distance(&uniform_map(1024)).unwrap();
    let d_diag = mean_attention_distance(&Tensor::eye(1024)).unwrap();
    let gap = distance_gap(31);
    outcome(vec![
        ((d_u - 341.33).abs() < 0.005 && (uniform_distance(1024) - d_u).abs() < 1e-9, format!("uniform D {d_u:.4}")),
        (d_diag == 0.0, format!("diagonal D {d_diag}")),
        (gap <= 1e-10, format!("brute-force gap {gap:.1e} on N <= 64")),
    ])
}

fn local_attention_equivalence() -> Outcome {
    let gap = local_full_gap();
    let moved = receptive_field_violations(200, 41);
    outcome(vec![
        (gap <= 1e-9, format!("local vs full gap {gap:.1e} for N <= 64, W >= 2N-1")),
        (moved == 0, format!("{moved}/200 far perturbations moved a state")),
    ])
}

fn gradient_suite_check() -> Outcome {
    let start = Instant::now();
    let suite = gradient_suite();
    let secs = start.elapsed().as_secs_f64();
    let mut checks: Vec<(bool, String)> = suite
        .into_iter()
        .map(|(name, err)| (err < GRAD_TOL, format!("{name} {err:.1e}")))
        .collect();
    checks.push((secs < 60.0, format!("{secs:.1}s")));
    outcome(checks)
}

fn selection_correctness() -> Outcome {
    let bad = selection_violations(1000, 51);
    let mismatched = oracle_ranking_mismatches(1000, 52);
    let (corpus, truth) = hand_agorc_corpus();
    let got = aggressive_fraction(&corpus, 10).unwrap().fraction;
    outcome(vec![
        (bad.is_empty(), format!("{} invariant violations over 1000 documents", bad.len())),
        (mismatched == 0, format!("{mismatched} oracle rankings differ from brute force")),
        (got == truth, format!("%AgORC {:.1} vs hand count {:.1}", 100.0 * got, 100.0 * truth)),
    ])
}

fn rouge_equivalence() -> Outcome {
    let start = Instant::now();
    let s = rouge_sweep(8);
    outcome(vec![
        (s.recall_mismatches == 0, format!("{} n-gram recall mismatches", s.recall_mismatches)),
        (s.lcs_mismatches == 0, format!("{} LCS mismatches", s.lcs_mismatches)),
        (s.pairs > 0, format!("{} pairs up to length 8 in {:.0}s", s.pairs, start.elapsed().as_secs_f64())),
    ])
}

fn mcs_behavior() -> Outcome {
    let r = recall_experiment(McsConfig::default(), 500);
    let mut rng = ChaCha8Rng::seed_from_u64(71);
    let mut invariant = true;
    for _ in 0..200 {
        let n = rng.gen_range(1..=20);
        let z: Vec<f64> = (0..n).map(|_| rng.gen_range(1e-3..1.0 - 1e-3)).collect();
        let a: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..3.0)).collect();
        let base = McsScores::from_channels(z.clone(), a.clone());
        let zt: Vec<f64> = z.iter().map(|v| (v / (1.0 - v)).ln()).collect();
        let at: Vec<f64> = a.iter().map(|v| v.powi(3) * 5.0 + 1.0).collect();
        let moved = McsScores::from_channels(zt, at);
        invariant &= moved.fused == base.fused && moved.ranking().indices == base.ranking().indices;
    }
    let continuous = [1u64, 7, 100, 4000, 10_000].iter().all(|&w| {
        let at = learning_rate(w, w, 0.002);
        let (step, warm) = (w as f64, w as f64);
        at == 0.002 * step.powf(-0.5)
            && at == 0.002 * ((step / warm) * warm.powf(-0.5))
            && learning_rate(w + 1, w, 0.002) <= at
            && (w == 1 || learning_rate(w - 1, w, 0.002) < at)
    });
    outcome(vec![
        (
            r.mcs_percent >= 1.5 * r.random_percent,
            format!("%Recall {:.1} vs random {:.1} ({:.2}x)", r.mcs_percent, r.random_percent, r.mcs_percent / r.random_percent),
        ),
        (r.steps <= 2000 && r.seconds < 300.0, format!("{} steps in {:.0}s, loss {:.1} -> {:.1}", r.steps, r.seconds, r.first_loss, r.last_loss)),
        (invariant, "fusion unchanged by monotone transforms".to_string()),
        (continuous, "schedule continuous at warmup".to_string()),
    ])
}

const PATH_FLAGS: &[&str] = &[
    "--input", "--output", "--truth", "--stats", "--curve", "--checkpoint", "--scores", "--candidates", "--references",
];

/// Runs one command in process with file arguments resolved against `dir`.
fn longsum(dir: &Path, args: &[&str], report: &str) -> bool {
    let mut argv = vec!["longsum".to_string(), "--report".to_string(), "json".to_string()];
    for (i, a) in args.iter().enumerate() {
        let is_path = i > 0 && PATH_FLAGS.contains(&args[i - 1]);
        argv.push(if is_path { dir.join(a).to_string_lossy().into_owned() } else { a.to_string() });
    }
    let mut out = Vec::new();
    let code = longsum_cli::run(argv, &mut out);
    std::fs::write(dir.join(report), &out).unwrap();
    code == 0
}

/// Generate, select, train, score, select by model, evaluate.
fn pipeline(dir: &Path) -> bool {
    let steps: &[(&[&str], &str)] = &[
        (&["generate-corpus", "--docs", "12", "--seed", "9", "--output", "corpus.jsonl", "--truth", "truth.jsonl"], "generate.json"),
        (&["select", "--input", "corpus.jsonl", "--output", "orc.jsonl", "--method", "orc-pad-rand", "--budget", "25", "--seed", "4", "--stats", "orc.stats.json"], "select-orc.json"),
        (&["train-mcs", "--input", "corpus.jsonl", "--output", "mcs.lsnt", "--curve", "curve.jsonl", "--embed", "12", "--hidden", "12", "--steps", "30", "--warmup", "10", "--seed", "4"], "train.json"),
        (&["score", "--input", "corpus.jsonl", "--checkpoint", "mcs.lsnt", "--output", "scores.jsonl"], "score.json"),
        (&["select", "--input", "corpus.jsonl", "--output", "mcs.jsonl", "--method", "mcs", "--budget", "25", "--scores", "scores.jsonl", "--stats", "mcs.stats.json"], "select-mcs.json"),
        (&["evaluate", "--candidates", "mcs.jsonl", "--references", "corpus.jsonl"], "evaluate.json"),
    ];
    steps.iter().all(|(args, report)| longsum(dir, args, report))
}

fn reproducibility() -> Outcome {
    let a = tempfile::TempDir::new().unwrap();
    let b = tempfile::TempDir::new().unwrap();
    let ran = pipeline(a.path()) && pipeline(b.path());
    let mut names: Vec<String> = std::fs::read_dir(a.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    let differing: Vec<&String> = names
        .iter()
        .filter(|n| std::fs::read(a.path().join(n)).ok() != std::fs::read(b.path().join(n)).ok())
        .collect();
    outcome(vec![
        (ran, "pipeline ran twice".to_string()),
        (differing.is_empty(), format!("{} artifacts compared, {} differ {differing:?}", names.len(), differing.len())),
    ])
}

type Check = fn() -> Outcome;

fn main() {
    let criteria: [(&str, Check); 8] = [
        ("cost-model fidelity", cost_model_fidelity),
        ("mean-distance fidelity", mean_distance_fidelity),
        ("local-attention equivalence", local_attention_equivalence),
        ("gradient suite", gradient_suite_check),
        ("selection correctness", selection_correctness),
        ("ROUGE oracle equivalence", rouge_equivalence),
        ("MCS behavior", mcs_behavior),
        ("reproducibility", reproducibility),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        println!("criterion {}: {} {name}: {}", i + 1, if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass {
            failed.push(i + 1);
        }
    }
    if failed.is_empty() {
        println!("all 8 criteria pass");
    } else {
        println!("failing criteria: {failed:?}");
        std::process::exit(1);
    }
}
