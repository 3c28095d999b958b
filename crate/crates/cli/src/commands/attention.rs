use std::io::Write;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, ValueEnum};
use longsum::attention::{mean_attention_distance, uniform_distance, uniform_map, ToyModelConfig, ToyTransformer, Window};
use longsum::numerics::Tensor;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::usage;
use crate::report::{self, Report, ReportFormat};

/// First token id drawn for random inputs; lower ids are special tokens.
const FIRST_WORD_ID: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SyntheticMap {
    Uniform,
    Diagonal,
}

#[derive(Args, Debug)]
pub struct AttentionArgs {
    /// Toy transformer checkpoint; a seeded random model is used when absent.
    #[arg(long, conflicts_with = "map")]
    pub checkpoint: Option<PathBuf>,
    /// Sequence length.
    #[arg(short = 'N', long = "n")]
    pub n: usize,
    /// Encoder window (`full` or a width); defaults to the checkpoint's, or full.
    #[arg(short = 'W', long = "w")]
    pub w: Option<Window>,
    /// Measure a synthetic map instead of a model.
    #[arg(long, value_enum)]
    pub map: Option<SyntheticMap>,
    /// Seed for the random model and its input tokens.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Serialize)]
struct LayerDistance {
    layer: usize,
    heads: Vec<f64>,
    mean: f64,
}

#[derive(Serialize)]
struct AttentionReport {
    n: usize,
    /// Mean distance of uniform attention at this length.
    d_uniform: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    window: Option<Window>,
    #[serde(skip_serializing_if = "Option::is_none")]
    map: Option<SyntheticMap>,
    /// Mean distance of the synthetic map.
    #[serde(skip_serializing_if = "Option::is_none")]
    d: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    layers: Vec<LayerDistance>,
}

impl Report for AttentionReport {
    fn text(&self) -> String {
        let mut s = format!("N={}  D_U={:.4}\n", self.n, self.d_uniform);
        if let (Some(m), Some(d)) = (self.map, self.d) {
            s.push_str(&format!("{} map: D={d:.4}\n", format!("{m:?}").to_lowercase()));
        }
        if let Some(w) = self.window {
            s.push_str(&format!("window: {w}\n"));
        }
        for l in &self.layers {
            let heads: Vec<String> = l.heads.iter().map(|d| format!("{d:.3}")).collect();
            s.push_str(&format!("layer {}: mean {:.3}  heads [{}]\n", l.layer, l.mean, heads.join(", ")));
        }
        s
    }
}

pub fn run(a: AttentionArgs, fmt: ReportFormat, out: &mut dyn Write) -> Result<usize> {
    if a.n == 0 {
        return usage("-N must be at least 1");
    }
    let mut report = AttentionReport {
        n: a.n,
        d_uniform: uniform_distance(a.n),
        window: None,
        map: a.map,
        d: None,
        layers: Vec::new(),
    };
    if let Some(m) = a.map {
        let t = match m {
            SyntheticMap::Uniform => uniform_map(a.n),
            SyntheticMap::Diagonal => Tensor::eye(a.n),
        };
        report.d = Some(mean_attention_distance(&t)?);
        report::print(out, &report, fmt)?;
        return Ok(0);
    }

    let mut model = match &a.checkpoint {
        Some(p) => ToyTransformer::load(p).with_context(|| format!("loading {}", p.display()))?,
        None => {
            let base = ToyModelConfig::default();
            let cfg = ToyModelConfig {
                max_source: a.n.div_ceil(base.base_positions) * base.base_positions,
                window: a.w.unwrap_or(Window::Full),
                ..base
            };
            ToyTransformer::new(cfg, a.seed)?
        }
    };
    if let Some(w) = a.w {
        model.config.window = w;
    }
    if a.n > model.config.max_source {
        return usage(format!(
            "-N {} exceeds the checkpoint's source limit of {}",
            a.n, model.config.max_source
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let lo = FIRST_WORD_ID.min(model.config.vocab - 1);
    let tokens: Vec<usize> = (0..a.n).map(|_| rng.gen_range(lo..model.config.vocab)).collect();
    let (_, maps) = model.encoder_states(&tokens)?;
    for (layer, map) in maps.iter().enumerate() {
        let heads = (0..map.heads())
            .map(|h| mean_attention_distance(&map.head(h)))
            .collect::<longsum::Result<Vec<f64>>>()?;
        let mean = heads.iter().sum::<f64>() / heads.len() as f64;
        report.layers.push(LayerDistance { layer, heads, mean });
    }
    report.window = Some(model.config.window);
    report::print(out, &report, fmt)?;
    Ok(0)
}
