use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mcs::model::{check_gamma, McsExample, McsModel};
use crate::numerics::Tape;
use crate::optim::{learning_rate, Adam, AdamConfig};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub steps: u64,
    pub batch_size: usize,
    pub warmup: u64,
    /// Multiplier of the inverse-square-root schedule (0.002 at full scale).
    pub lr_scale: f64,
    pub gamma: f64,
    /// Validation checks without improvement before stopping; 0 disables early stopping.
    pub patience: usize,
    pub eval_every: u64,
    pub seed: u64,
    pub adam: AdamConfig,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            steps: 500,
            batch_size: 4,
            warmup: 100,
            lr_scale: 0.03,
            gamma: 0.2,
            patience: 0,
            eval_every: 50,
            seed: 0,
            adam: AdamConfig::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LossPoint {
    pub step: u64,
    pub loss: f64,
    pub lr: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    /// Mean batch loss at every step.
    pub curve: Vec<LossPoint>,
    /// Mean validation loss at every check.
    pub validation: Vec<LossPoint>,
    pub steps_run: u64,
    pub stopped_early: bool,
    /// Step whose parameters were kept (the best validation check, or the last step).
    pub best_step: u64,
}

fn mean_loss(model: &McsModel, set: &[McsExample], gamma: f64) -> Result<f64> {
    let mut total = 0.0;
    for ex in set {
        total += model.example_loss(ex, gamma)?;
    }
    Ok(total / set.len() as f64)
}

/// Mini-batch Adam on the combined loss.
///
/// When `valid` is non-empty and patience is set, training stops after
/// `patience` checks without improvement and the best checkpoint is restored.
pub fn train(
    model: &mut McsModel,
    examples: &[McsExample],
    valid: &[McsExample],
    cfg: &TrainConfig,
) -> Result<TrainReport> {
    check_gamma(cfg.gamma)?;
    if examples.is_empty() {
        return Err(Error::Input("no training examples".into()));
    }
    if cfg.batch_size == 0 || cfg.eval_every == 0 {
        return Err(Error::Domain("batch size and evaluation interval must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut adam = Adam::new(cfg.adam);
    let mut order: Vec<usize> = Vec::new();
    let mut report = TrainReport {
        curve: Vec::new(),
        validation: Vec::new(),
        steps_run: 0,
        stopped_early: false,
        best_step: 0,
    };
    let mut best: Option<(f64, crate::params::ParamStore)> = None;
    let mut since_best = 0;

    for step in 1..=cfg.steps {
        let mut batch = Vec::with_capacity(cfg.batch_size);
        while batch.len() < cfg.batch_size {
            if order.is_empty() {
                order = (0..examples.len()).collect();
                order.shuffle(&mut rng);
            }
            batch.push(order.pop().expect("refilled"));
        }

        let mut tape = Tape::new();
        let b = model.params.bind(&mut tape);
        let mut losses = Vec::with_capacity(batch.len());
        for &i in &batch {
            let ex = &examples[i];
            let drop_rng: Option<&mut dyn rand::RngCore> =
                if model.config.dropout > 0.0 { Some(&mut rng) } else { None };
            let enc = model.encode(&mut tape, &b, &ex.doc, drop_rng)?;
            losses.push(model.mcs_loss(&mut tape, &b, &enc, &ex.target, &ex.labels, cfg.gamma)?);
        }
        let mut total = losses[0];
        for &l in &losses[1..] {
            total = tape.add(total, l)?;
        }
        let loss = tape.scale(total, 1.0 / batch.len() as f64);
        let value = tape.value(loss).item();
        if !value.is_finite() {
            return Err(Error::Divergence { step, loss: value });
        }
        tape.backward(loss)?;
        let grads = b.grads(&tape);
        let lr = learning_rate(step, cfg.warmup, cfg.lr_scale);
        adam.step(&mut model.params, &grads, lr)?;
        report.curve.push(LossPoint { step, loss: value, lr });
        report.steps_run = step;
        report.best_step = step;

        if !valid.is_empty() && step % cfg.eval_every == 0 {
            let v = mean_loss(model, valid, cfg.gamma)?;
            if !v.is_finite() {
                return Err(Error::Divergence { step, loss: v });
            }
            report.validation.push(LossPoint { step, loss: v, lr });
            log::info!("step {step}: train {value:.4}, valid {v:.4}");
            if best.as_ref().is_none_or(|(bv, _)| v < *bv) {
                best = Some((v, model.params.clone()));
                since_best = 0;
            } else {
                since_best += 1;
                if cfg.patience > 0 && since_best >= cfg.patience {
                    report.stopped_early = true;
                    break;
                }
            }
        }
    }
    if let Some((_, params)) = best.filter(|_| cfg.patience > 0) {
        model.params = params;
        report.best_step = report
            .validation
            .iter()
            .min_by(|a, b| a.loss.total_cmp(&b.loss))
            .map_or(report.steps_run, |p| p.step);
    }
    Ok(report)
}
