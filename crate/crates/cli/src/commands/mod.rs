pub mod attention;
pub mod corpus;
pub mod cost;
pub mod evaluate;
pub mod fit;
pub mod mcs;
pub mod select;

use std::path::Path;

use anyhow::Result;
use clap::{Args, ValueEnum};
use longsum::costmodel::{CoefficientSet, ModelKind};
use longsum::mcs::BeamConfig;

/// Bad or inconsistent arguments caught after clap has parsed them.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

pub fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(UsageError(msg.into()).into())
}

/// 2 for usage and argument-domain errors, 1 for everything else.
pub fn exit_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<UsageError>().is_some() {
        return 2;
    }
    match e.downcast_ref::<longsum::Error>() {
        Some(longsum::Error::Domain(_) | longsum::Error::InvalidWindow) => 2,
        _ => 1,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Bart,
    Lobart,
    Hier,
    TimeQuadratic,
    TimeLinear,
}

impl From<KindArg> for ModelKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Bart => ModelKind::Bart,
            KindArg::Lobart => ModelKind::Lobart,
            KindArg::Hier => ModelKind::HierRnn,
            KindArg::TimeQuadratic => ModelKind::TimeQuadratic,
            KindArg::TimeLinear => ModelKind::TimeLinear,
        }
    }
}

pub fn coefficients(path: Option<&Path>) -> Result<CoefficientSet> {
    Ok(match path {
        Some(p) => CoefficientSet::load(p)?,
        None => CoefficientSet::default(),
    })
}

/// Beam-search settings for MCS inference.
#[derive(Args, Clone, Debug)]
pub struct BeamArgs {
    /// Beam width.
    #[arg(long, default_value_t = 4)]
    pub beam_width: usize,
    /// Length-penalty exponent.
    #[arg(long, default_value_t = 2.0)]
    pub length_penalty: f64,
    /// Minimum summary length before the end token is allowed.
    #[arg(long, default_value_t = 0)]
    pub min_len: usize,
    /// Maximum summary length; defaults to the model's target limit.
    #[arg(long)]
    pub max_len: Option<usize>,
    /// Block repeated n-grams of this size (0 disables).
    #[arg(long, default_value_t = 3)]
    pub no_repeat_ngram: usize,
}

impl BeamArgs {
    pub fn config(&self, max_target: usize) -> BeamConfig {
        BeamConfig {
            width: self.beam_width,
            length_penalty: self.length_penalty,
            min_len: self.min_len,
            max_len: self.max_len.unwrap_or(max_target),
            no_repeat_ngram: self.no_repeat_ngram,
        }
    }
}
