//! Adam with the inverse-square-root warmup schedule.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::Tensor;
use crate::params::ParamStore;

/// `scale · min(step^-0.5, step · warmup^-1.5)` for `step ≥ 1`.
pub fn learning_rate(step: u64, warmup: u64, scale: f64) -> f64 {
    let s = step.max(1) as f64;
    let w = warmup.max(1) as f64;
    // s · w^-1.5 written as (s / w) · w^-0.5 so both branches agree bit-for-bit at s = w.
    scale * s.powf(-0.5).min((s / w) * w.powf(-0.5))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig {
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Adam {
    config: AdamConfig,
    m: BTreeMap<String, Tensor>,
    v: BTreeMap<String, Tensor>,
    t: u64,
}

impl Adam {
    pub fn new(config: AdamConfig) -> Self {
        Adam {
            config,
            m: BTreeMap::new(),
            v: BTreeMap::new(),
            t: 0,
        }
    }

    pub fn steps(&self) -> u64 {
        self.t
    }

    /// Applies one bias-corrected update. Parameters without a gradient are left alone.
    pub fn step(&mut self, params: &mut ParamStore, grads: &BTreeMap<String, Tensor>, lr: f64) -> Result<()> {
        self.t += 1;
        let AdamConfig { beta1, beta2, eps } = self.config;
        let c1 = 1.0 - beta1.powi(self.t as i32);
        let c2 = 1.0 - beta2.powi(self.t as i32);
        for (name, p) in params.iter_mut() {
            let Some(g) = grads.get(name) else { continue };
            if g.shape() != p.shape() {
                return Err(Error::dim("adam", p.shape(), g.shape()));
            }
            let m = self
                .m
                .entry(name.clone())
                .or_insert_with(|| Tensor::zeros(p.shape()));
            let v = self
                .v
                .entry(name.clone())
                .or_insert_with(|| Tensor::zeros(p.shape()));
            for (((pi, gi), mi), vi) in p
                .data_mut()
                .iter_mut()
                .zip(g.data())
                .zip(m.data_mut())
                .zip(v.data_mut())
            {
                *mi = beta1 * *mi + (1.0 - beta1) * gi;
                *vi = beta2 * *vi + (1.0 - beta2) * gi * gi;
                *pi -= lr * (*mi / c1) / ((*vi / c2).sqrt() + eps);
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_branches_meet_at_warmup() {
        let w = 10_000;
        let lr = learning_rate(w, w, 0.002);
        assert_eq!(lr, 0.002 * (w as f64).powf(-0.5));
        for w in [1, 7, 100, 4000, 10_000] {
            let warm = learning_rate(w, w, 0.002);
            assert_eq!(warm, 0.002 * (w as f64).powf(-0.5));
            let linear = 0.002 * (w as f64 / w as f64) * (w as f64).powf(-0.5);
            assert_eq!(warm, linear);
        }
        assert!(learning_rate(w / 2, w, 0.002) < lr);
        assert!(learning_rate(2 * w, w, 0.002) < lr);
    }

    #[test]
    fn minimizes_a_quadratic() {
        let mut store = ParamStore::new();
        store.insert("x", Tensor::new(vec![2], vec![3.0, -2.0]).unwrap());
        let mut adam = Adam::new(AdamConfig::default());
        for _ in 0..2000 {
            let x = store.get("x").unwrap().clone();
            let g: BTreeMap<String, Tensor> = [("x".to_string(), x.map(|v| 2.0 * v))].into();
            adam.step(&mut store, &g, 0.01).unwrap();
        }
        assert!(store.get("x").unwrap().norm() < 1e-3);
    }
}
