use std::io::Write;
use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use longsum::attention::Window;
use longsum::costmodel::{
    advise_operating_point, bart_memory, breakeven_width, hier_rnn_memory, lobart_memory, Advice,
    Candidate, MemoryBreakdown,
};
use serde::Serialize;

use super::{coefficients, usage, KindArg};
use crate::report::{self, Report, ReportFormat};

#[derive(Args, Debug)]
pub struct CostArgs {
    /// Model family: bart (full attention), lobart (local attention) or hier (hierarchical RNN).
    #[arg(long, value_enum)]
    pub kind: KindArg,
    /// Input length in tokens.
    #[arg(short = 'N', long = "n")]
    pub n: Option<usize>,
    /// Target length in tokens.
    #[arg(short = 'M', long = "m", default_value_t = 144)]
    pub m: usize,
    /// Local attention width (lobart only).
    #[arg(short = 'W', long = "w")]
    pub w: Option<usize>,
    /// Batch size.
    #[arg(short = 'B', long = "b", default_value_t = 1)]
    pub b: usize,
    /// Maximum sentences per document (hier only; also accepted as -N1).
    #[arg(long)]
    pub n1: Option<usize>,
    /// Maximum words per sentence (hier only; also accepted as -N2).
    #[arg(long)]
    pub n2: Option<usize>,
    /// Coefficient file replacing the built-in fitted values.
    #[arg(long)]
    pub coefficients: Option<PathBuf>,
    /// Device memory budget in GiB.
    #[arg(long)]
    pub budget: Option<f64>,
}

#[derive(Serialize)]
struct CostReport {
    breakdown: MemoryBreakdown,
    #[serde(skip_serializing_if = "Option::is_none")]
    budget_gib: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    feasible: Option<bool>,
    /// Widest local window that still uses less memory than full attention at this N.
    #[serde(skip_serializing_if = "Option::is_none")]
    breakeven_width: Option<f64>,
}

impl Report for CostReport {
    fn text(&self) -> String {
        let b = &self.breakdown;
        let mut s = format!("model: {}", kind_name(b));
        for (k, v) in [("N", b.n), ("M", b.m), ("W", b.w), ("N1", b.n1), ("N2", b.n2)] {
            if let Some(v) = v {
                s.push_str(&format!("  {k}={v}"));
            }
        }
        s.push_str(&format!("  B={}\n", b.batch));
        for t in &b.terms {
            s.push_str(&format!("  {:<10} {:>10.3} GiB\n", t.name, t.gib));
        }
        s.push_str(&format!("  {:<10} {:>10.3} GiB\n", "total", b.total));
        if let (Some(budget), Some(ok)) = (self.budget_gib, self.feasible) {
            let verdict = if ok { "fits" } else { "exceeds" };
            s.push_str(&format!("budget: {budget:.2} GiB ({verdict})\n"));
        }
        if let Some(w) = self.breakeven_width {
            s.push_str(&format!("break-even window: {w:.1} tokens\n"));
        }
        s
    }
}

fn kind_name(b: &MemoryBreakdown) -> String {
    serde_json::to_value(b.kind)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}

pub fn run(a: CostArgs, fmt: ReportFormat, out: &mut dyn Write) -> Result<usize> {
    let set = coefficients(a.coefficients.as_deref())?;
    let need_n = || a.n.map_or_else(|| usage("-N is required for this model kind"), Ok);
    let (breakdown, breakeven) = match a.kind {
        KindArg::Bart => {
            let n = need_n()?;
            (
                bart_memory(n, a.m, a.b, &set.bart)?,
                Some(breakeven_width(n, &set.bart, &set.lobart)?),
            )
        }
        KindArg::Lobart => {
            let n = need_n()?;
            let Some(w) = a.w else { return usage("-W is required for --kind lobart") };
            (
                lobart_memory(n, a.m, w, a.b, &set.lobart)?,
                Some(breakeven_width(n, &set.bart, &set.lobart)?),
            )
        }
        KindArg::Hier => {
            let (Some(n1), Some(n2)) = (a.n1, a.n2) else {
                return usage("-N1 and -N2 are required for --kind hier");
            };
            (hier_rnn_memory(n1, n2, a.b, &set.hier_rnn)?, None)
        }
        KindArg::TimeQuadratic | KindArg::TimeLinear => {
            return usage("timing bases only apply to fit-cost")
        }
    };
    if let Some(budget) = a.budget {
        if !(budget.is_finite() && budget > 0.0) {
            return usage("--budget must be a positive number of GiB");
        }
    }
    let feasible = a.budget.map(|g| breakdown.total <= g);
    report::print(
        out,
        &CostReport {
            breakdown,
            budget_gib: a.budget,
            feasible,
            breakeven_width: breakeven,
        },
        fmt,
    )?;
    Ok(0)
}

#[derive(Args, Debug)]
pub struct AdviseArgs {
    /// Device memory budget in GiB.
    #[arg(long)]
    pub budget: f64,
    /// Candidate input lengths, comma separated.
    #[arg(short = 'N', long = "n", value_delimiter = ',', required = true)]
    pub n: Vec<usize>,
    /// Candidate windows (`full` or a width), comma separated.
    #[arg(short = 'W', long = "w", value_delimiter = ',', default_value = "full")]
    pub w: Vec<Window>,
    /// Target length in tokens.
    #[arg(short = 'M', long = "m", default_value_t = 144)]
    pub m: usize,
    /// Batch size.
    #[arg(short = 'B', long = "b", default_value_t = 1)]
    pub b: usize,
    /// Coefficient file replacing the built-in fitted values.
    #[arg(long)]
    pub coefficients: Option<PathBuf>,
}

#[derive(Serialize)]
struct AdviseReport {
    #[serde(flatten)]
    advice: Advice,
}

impl Report for AdviseReport {
    fn text(&self) -> String {
        let a = &self.advice;
        let mut s = format!("budget {:.2} GiB, M={}, B={}\n", a.budget_gib, a.m, a.b);
        s.push_str(&format!("  {:>8} {:>8} {:>10}  fits\n", "N", "W", "GiB"));
        for p in &a.points {
            let mark = if p.feasible { "yes" } else { "no" };
            s.push_str(&format!("  {:>8} {:>8} {:>10.3}  {mark}\n", p.n, p.window.to_string(), p.total_gib));
        }
        s
    }
}

pub fn run_advise(a: AdviseArgs, fmt: ReportFormat, out: &mut dyn Write) -> Result<usize> {
    if !(a.budget.is_finite() && a.budget > 0.0) {
        return usage("--budget must be a positive number of GiB");
    }
    let set = coefficients(a.coefficients.as_deref())?;
    let candidates: Vec<Candidate> = a
        .n
        .iter()
        .flat_map(|&n| a.w.iter().map(move |&window| Candidate { n, window }))
        .collect();
    let advice = advise_operating_point(a.budget, a.m, a.b, &candidates, &set)?;
    report::print(out, &AdviseReport { advice }, fmt)?;
    Ok(0)
}
