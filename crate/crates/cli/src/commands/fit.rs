use std::io::Write;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;
use longsum::costmodel::{fit_coefficients, CostCoefficients, ModelKind, Sample};
use serde::Serialize;

use super::{coefficients, usage, KindArg};
use crate::io::read_text;
use crate::report::{self, failures_text, RecordFailure, Report, ReportFormat};

#[derive(Args, Debug)]
pub struct FitArgs {
    /// JSONL samples: `{"n","m","w"?,"b","value"}` or `{"n1","n2","b","value"}`.
    #[arg(long)]
    pub input: PathBuf,
    /// Basis to fit.
    #[arg(long, value_enum)]
    pub kind: KindArg,
    /// Write a coefficient file with the fitted values replacing this kind's entries.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Coefficient file supplying the other kinds' entries in `--output`.
    #[arg(long)]
    pub coefficients: Option<PathBuf>,
}

#[derive(Serialize)]
struct FitReport {
    kind: ModelKind,
    samples: usize,
    terms: Vec<FitTerm>,
    rmse: f64,
    r2: f64,
    failures: Vec<RecordFailure>,
}

#[derive(Serialize)]
struct FitTerm {
    name: &'static str,
    value: f64,
}

impl Report for FitReport {
    fn text(&self) -> String {
        let mut s = format!("fitted {:?} on {} samples\n", self.kind, self.samples);
        for t in &self.terms {
            s.push_str(&format!("  {:<10} {:>14.6e}\n", t.name, t.value));
        }
        s.push_str(&format!("rmse: {:.6}\nr2: {:.6}\n", self.rmse, self.r2));
        if !self.failures.is_empty() {
            s.push_str(&format!("failures: {}\n{}", self.failures.len(), failures_text(&self.failures)));
        }
        s
    }
}

pub fn run(a: FitArgs, fmt: ReportFormat, out: &mut dyn Write) -> Result<usize> {
    let kind = ModelKind::from(a.kind);
    if a.output.is_some() && !matches!(kind, ModelKind::Bart | ModelKind::Lobart | ModelKind::HierRnn) {
        return usage("timing fits cannot be written to a coefficient file");
    }
    let text = read_text(&a.input)?;
    let mut samples = Vec::new();
    let mut failures = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<Sample>(line) {
            Ok(s) => samples.push(s),
            Err(e) => failures.push(RecordFailure::new(i + 1, None, e)),
        }
    }
    let fit = fit_coefficients(&samples, kind)?;
    if let Some(path) = &a.output {
        // Reject values the coefficient file loader would refuse.
        let checked = CostCoefficients::new(kind, fit.coefficients.values.clone())
            .context("fitted coefficients cannot be stored")?;
        let mut set = coefficients(a.coefficients.as_deref())?;
        set.set(checked)?;
        std::fs::write(path, set.to_file_string()).with_context(|| format!("writing {}", path.display()))?;
    }
    let terms = kind
        .term_names()
        .iter()
        .zip(&fit.coefficients.values)
        .map(|(&name, &value)| FitTerm { name, value })
        .collect();
    let n_fail = failures.len();
    report::print(
        out,
        &FitReport {
            kind,
            samples: samples.len(),
            terms,
            rmse: fit.rmse,
            r2: fit.r2,
            failures,
        },
        fmt,
    )?;
    Ok(n_fail)
}
