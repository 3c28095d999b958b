use serde::{Deserialize, Serialize};

use crate::costmodel::coefficients::{CostCoefficients, ModelKind};
use crate::error::{Error, Result};

/// Bytes per GiB.
pub const GIB: f64 = 1_073_741_824.0;

/// Encoder–decoder training run size.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Workload {
    /// Input length in tokens.
    pub n: usize,
    /// Target length in tokens.
    pub m: usize,
    /// Local attention width; `None` for full attention.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<usize>,
    /// Batch size.
    pub b: usize,
}

/// Hierarchical RNN training run size.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HierWorkload {
    /// Number of sentences.
    pub n1: usize,
    /// Maximum words per sentence.
    pub n2: usize,
    pub b: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MemoryTerm {
    pub name: String,
    pub gib: f64,
}

/// Per-term memory prediction; `total` is the sum of `terms`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MemoryBreakdown {
    pub kind: ModelKind,
    pub terms: Vec<MemoryTerm>,
    pub total: f64,
    pub batch: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n1: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n2: Option<usize>,
}

impl MemoryBreakdown {
    pub fn term(&self, name: &str) -> Option<f64> {
        self.terms.iter().find(|t| t.name == name).map(|t| t.gib)
    }
}

/// Basis values for a transformer workload under `kind`.
pub(crate) fn transformer_basis(kind: ModelKind, x: &Workload) -> Result<Vec<f64>> {
    let (n, m, b) = (x.n as f64, x.m as f64, x.b as f64);
    match kind {
        ModelKind::Bart => Ok(vec![1.0, b * m, b * n, b * m * n, b * m * m, b * n * n]),
        ModelKind::Lobart => {
            let w = x
                .w
                .ok_or_else(|| Error::Domain("local attention needs a window width".into()))?
                as f64;
            Ok(vec![1.0, b * m, b * n, b * m * n, b * m * m, b * n * w])
        }
        ModelKind::TimeQuadratic => Ok(vec![1.0, b * n, b * n * n]),
        ModelKind::TimeLinear => {
            let w = x
                .w
                .ok_or_else(|| Error::Domain("local attention needs a window width".into()))?
                as f64;
            Ok(vec![1.0, b * n, b * n * w])
        }
        ModelKind::HierRnn => Err(Error::Domain(
            "hierarchical RNN memory takes sentence counts, not token lengths".into(),
        )),
    }
}

pub(crate) fn hier_basis(x: &HierWorkload) -> Vec<f64> {
    let (n1, n2, b) = (x.n1 as f64, x.n2 as f64, x.b as f64);
    vec![1.0, b * n1, b * n1 * n2]
}

fn check_positive(pairs: &[(&str, usize)]) -> Result<()> {
    for (name, v) in pairs {
        if *v == 0 {
            return Err(Error::Domain(format!("{name} must be at least 1")));
        }
    }
    Ok(())
}

fn breakdown(coeffs: &CostCoefficients, basis: &[f64]) -> MemoryBreakdown {
    let terms: Vec<MemoryTerm> = coeffs
        .kind
        .term_names()
        .iter()
        .zip(&coeffs.values)
        .zip(basis)
        .map(|((name, c), x)| MemoryTerm {
            name: (*name).to_string(),
            gib: c * x,
        })
        .collect();
    let total = terms.iter().map(|t| t.gib).sum();
    MemoryBreakdown {
        kind: coeffs.kind,
        terms,
        total,
        batch: 0,
        n: None,
        m: None,
        w: None,
        n1: None,
        n2: None,
    }
}

fn expect_kind(coeffs: &CostCoefficients, kind: ModelKind) -> Result<()> {
    if coeffs.kind != kind {
        return Err(Error::Domain(format!(
            "expected {kind:?} coefficients, got {:?}",
            coeffs.kind
        )));
    }
    Ok(())
}

/// Training memory with full encoder self-attention.
pub fn bart_memory(n: usize, m: usize, b: usize, coeffs: &CostCoefficients) -> Result<MemoryBreakdown> {
    expect_kind(coeffs, ModelKind::Bart)?;
    check_positive(&[("N", n), ("M", m), ("B", b)])?;
    let x = Workload { n, m, w: None, b };
    let mut out = breakdown(coeffs, &transformer_basis(ModelKind::Bart, &x)?);
    out.batch = b;
    out.n = Some(n);
    out.m = Some(m);
    Ok(out)
}

/// Training memory with local encoder self-attention of width `w`.
pub fn lobart_memory(
    n: usize,
    m: usize,
    w: usize,
    b: usize,
    coeffs: &CostCoefficients,
) -> Result<MemoryBreakdown> {
    expect_kind(coeffs, ModelKind::Lobart)?;
    check_positive(&[("N", n), ("M", m), ("W", w), ("B", b)])?;
    let x = Workload { n, m, w: Some(w), b };
    let mut out = breakdown(coeffs, &transformer_basis(ModelKind::Lobart, &x)?);
    out.batch = b;
    out.n = Some(n);
    out.m = Some(m);
    out.w = Some(w);
    Ok(out)
}

/// Training memory of the hierarchical RNN (fitted at target length 144).
pub fn hier_rnn_memory(
    n1: usize,
    n2: usize,
    b: usize,
    coeffs: &CostCoefficients,
) -> Result<MemoryBreakdown> {
    expect_kind(coeffs, ModelKind::HierRnn)?;
    check_positive(&[("N1", n1), ("N2", n2), ("B", b)])?;
    let mut out = breakdown(coeffs, &hier_basis(&HierWorkload { n1, n2, b }));
    out.batch = b;
    out.n1 = Some(n1);
    out.n2 = Some(n2);
    Ok(out)
}

/// Model, gradient and Adam moment memory in GiB.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelMemory {
    pub parameters: f64,
    pub gradients: f64,
    pub adam_first_moment: f64,
    pub adam_second_moment: f64,
    pub total: f64,
}

impl ModelMemory {
    pub fn optimizer(&self) -> f64 {
        self.adam_first_moment + self.adam_second_moment
    }
}

pub fn model_optimizer_memory(param_count: u64, bytes_per_value: u32) -> ModelMemory {
    let p = param_count as f64 * bytes_per_value as f64 / GIB;
    ModelMemory {
        parameters: p,
        gradients: p,
        adam_first_moment: p,
        adam_second_moment: p,
        total: 4.0 * p,
    }
}

pub const BART_LARGE_PARAMS: u64 = 406_290_432;

/// Parameter count of the `n_k`·1024-token local-attention model.
///
/// Uses the published expression `406M + 50,264 × (n − 1) × 1,024`.
pub fn lobart_param_count(n_k: u64) -> u64 {
    BART_LARGE_PARAMS + 50_264 * n_k.saturating_sub(1) * 1_024
}

/// Largest window for which local attention still saves memory: `(c_b_6 / c_l_6) · N`.
pub fn breakeven_width(n: usize, bart: &CostCoefficients, lobart: &CostCoefficients) -> Result<f64> {
    expect_kind(bart, ModelKind::Bart)?;
    expect_kind(lobart, ModelKind::Lobart)?;
    let cl6 = lobart.attention_term();
    if cl6 == 0.0 {
        return Err(Error::Domain("c_l_6 is zero; break-even width is undefined".into()));
    }
    Ok(bart.attention_term() / cl6 * n as f64)
}
