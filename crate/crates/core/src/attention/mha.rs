use rand::Rng;

use crate::error::{Error, Result};
use crate::numerics::{Mask, Tape, Tensor, Var};
use crate::params::{Bound, ParamStore};

/// Per-head attention weights, `[heads × N_q × N_k]`, rows stochastic.
#[derive(Clone, Debug, PartialEq)]
pub struct AttentionMap {
    pub weights: Tensor,
}

impl AttentionMap {
    pub fn heads(&self) -> usize {
        self.weights.shape()[0]
    }

    /// The `[N_q × N_k]` map of one head.
    pub fn head(&self, h: usize) -> Tensor {
        let (nq, nk) = (self.weights.shape()[1], self.weights.shape()[2]);
        let stride = nq * nk;
        Tensor::new(
            vec![nq, nk],
            self.weights.data()[h * stride..(h + 1) * stride].to_vec(),
        )
        .expect("slice of a well-formed map")
    }
}

/// Projection parameters of one attention block.
#[derive(Clone, Copy, Debug)]
pub struct AttentionParams {
    pub wq: Var,
    pub bq: Var,
    pub wk: Var,
    pub bk: Var,
    pub wv: Var,
    pub bv: Var,
    pub wo: Var,
    pub bo: Var,
}

impl AttentionParams {
    pub fn init<R: Rng + ?Sized>(store: &mut ParamStore, prefix: &str, d_model: usize, rng: &mut R) {
        let s = 1.0 / (d_model as f64).sqrt();
        for w in ["wq", "wk", "wv", "wo"] {
            store.insert(format!("{prefix}.{w}"), Tensor::uniform(&[d_model, d_model], s, rng));
        }
        for b in ["bq", "bk", "bv", "bo"] {
            store.insert(format!("{prefix}.{b}"), Tensor::zeros(&[d_model]));
        }
    }

    pub fn bind(bound: &Bound, prefix: &str) -> Result<Self> {
        let g = |n: &str| bound.get(&format!("{prefix}.{n}"));
        Ok(AttentionParams {
            wq: g("wq")?,
            bq: g("bq")?,
            wk: g("wk")?,
            bk: g("bk")?,
            wv: g("wv")?,
            bv: g("bv")?,
            wo: g("wo")?,
            bo: g("bo")?,
        })
    }
}

/// Scaled dot-product attention split over `n_heads`.
///
/// `q` is `[N_q × d]`, `k` and `v` are `[N_k × d]`, `mask` is `[N_q × N_k]`.
/// Returns the projected output and the per-head weight handles.
pub fn multi_head_attention(
    tape: &mut Tape,
    q: Var,
    k: Var,
    v: Var,
    mask: &Mask,
    p: &AttentionParams,
    n_heads: usize,
) -> Result<(Var, Vec<Var>)> {
    let d_model = tape.shape(p.wq)[0];
    if n_heads == 0 || !d_model.is_multiple_of(n_heads) {
        return Err(Error::Domain(format!(
            "d_model {d_model} is not divisible by {n_heads} heads"
        )));
    }
    let nq = tape.shape(q)[0];
    let nk = tape.shape(k)[0];
    if mask.rows() != nq || mask.cols() != nk {
        return Err(Error::dim("multi_head_attention", &[nq, nk], &[mask.rows(), mask.cols()]));
    }
    let d_head = d_model / n_heads;
    let scale = 1.0 / (d_head as f64).sqrt();

    let qp = tape.matmul(q, p.wq)?;
    let qp = tape.add_row(qp, p.bq)?;
    let kp = tape.matmul(k, p.wk)?;
    let kp = tape.add_row(kp, p.bk)?;
    let vp = tape.matmul(v, p.wv)?;
    let vp = tape.add_row(vp, p.bv)?;

    let mut heads = Vec::with_capacity(n_heads);
    let mut weights = Vec::with_capacity(n_heads);
    for h in 0..n_heads {
        let qh = tape.slice_cols(qp, h * d_head, d_head)?;
        let kh = tape.slice_cols(kp, h * d_head, d_head)?;
        let vh = tape.slice_cols(vp, h * d_head, d_head)?;
        let kt = tape.transpose(kh)?;
        let scores = tape.matmul(qh, kt)?;
        let scores = tape.scale(scores, scale);
        let alpha = tape.masked_softmax(scores, mask)?;
        heads.push(tape.matmul(alpha, vh)?);
        weights.push(alpha);
    }
    let ctx = tape.concat_cols(&heads)?;
    let out = tape.matmul(ctx, p.wo)?;
    let out = tape.add_row(out, p.bo)?;
    Ok((out, weights))
}

/// Collects head weight handles into an [`AttentionMap`].
pub fn collect_map(tape: &Tape, weights: &[Var]) -> AttentionMap {
    let first = tape.value(weights[0]);
    let (nq, nk) = (first.shape()[0], first.shape()[1]);
    let mut data = Vec::with_capacity(weights.len() * nq * nk);
    for &w in weights {
        data.extend_from_slice(tape.value(w).data());
    }
    AttentionMap {
        weights: Tensor::new(vec![weights.len(), nq, nk], data).expect("consistent heads"),
    }
}
