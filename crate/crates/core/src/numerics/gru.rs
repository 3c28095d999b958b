use rand::Rng;

use crate::error::{Error, Result};
use crate::numerics::{Tape, Tensor, Var};
use crate::params::{Bound, ParamStore};

/// Handles to one GRU cell's parameters on a tape.
///
/// Gate blocks are laid out `[reset | update | candidate]` along the columns
/// of `w_x` (`d_in × 3h`) and `w_h` (`h × 3h`).
#[derive(Clone, Copy, Debug)]
pub struct GruParams {
    pub w_x: Var,
    pub w_h: Var,
    pub b_x: Var,
    pub b_h: Var,
}

impl GruParams {
    /// Registers freshly initialized cell parameters under `prefix`.
    pub fn init<R: Rng + ?Sized>(
        store: &mut ParamStore,
        prefix: &str,
        d_in: usize,
        d_h: usize,
        rng: &mut R,
    ) {
        let s = 1.0 / (d_h as f64).sqrt();
        store.insert(format!("{prefix}.w_x"), Tensor::uniform(&[d_in, 3 * d_h], s, rng));
        store.insert(format!("{prefix}.w_h"), Tensor::uniform(&[d_h, 3 * d_h], s, rng));
        store.insert(format!("{prefix}.b_x"), Tensor::uniform(&[3 * d_h], s, rng));
        store.insert(format!("{prefix}.b_h"), Tensor::uniform(&[3 * d_h], s, rng));
    }

    pub fn bind(bound: &Bound, prefix: &str) -> Result<Self> {
        Ok(GruParams {
            w_x: bound.get(&format!("{prefix}.w_x"))?,
            w_h: bound.get(&format!("{prefix}.w_h"))?,
            b_x: bound.get(&format!("{prefix}.b_x"))?,
            b_h: bound.get(&format!("{prefix}.b_h"))?,
        })
    }

    pub fn hidden(&self, tape: &Tape) -> usize {
        tape.shape(self.w_h)[0]
    }
}

/// One GRU step over a batch of rows: `x` is `[b × d_in]`, `h_prev` is `[b × h]`.
///
/// ```text
/// r = σ(x W_r + b_xr + h W_hr + b_hr)
/// z = σ(x W_z + b_xz + h W_hz + b_hz)
/// n = tanh(x W_n + b_xn + r ⊙ (h W_hn + b_hn))
/// h' = (1 − z) ⊙ n + z ⊙ h
/// ```
pub fn gru_cell(tape: &mut Tape, x: Var, h_prev: Var, p: &GruParams) -> Result<Var> {
    let d_h = p.hidden(tape);
    let d_in = tape.shape(p.w_x)[0];
    let xs = tape.shape(x).to_vec();
    let hs = tape.shape(h_prev).to_vec();
    if xs.len() != 2 || xs[1] != d_in {
        return Err(Error::dim("gru_cell", &xs, tape.shape(p.w_x)));
    }
    if hs.len() != 2 || hs[1] != d_h || hs[0] != xs[0] {
        return Err(Error::dim("gru_cell", &hs, tape.shape(p.w_h)));
    }
    let gx = tape.matmul(x, p.w_x)?;
    let gx = tape.add_row(gx, p.b_x)?;
    let gh = tape.matmul(h_prev, p.w_h)?;
    let gh = tape.add_row(gh, p.b_h)?;

    let gx_rz = tape.slice_cols(gx, 0, 2 * d_h)?;
    let gh_rz = tape.slice_cols(gh, 0, 2 * d_h)?;
    let rz = tape.add(gx_rz, gh_rz)?;
    let rz = tape.sigmoid(rz);
    let r = tape.slice_cols(rz, 0, d_h)?;
    let z = tape.slice_cols(rz, d_h, d_h)?;

    let gx_n = tape.slice_cols(gx, 2 * d_h, d_h)?;
    let gh_n = tape.slice_cols(gh, 2 * d_h, d_h)?;
    let rgh = tape.mul(r, gh_n)?;
    let n = tape.add(gx_n, rgh)?;
    let n = tape.tanh(n);

    // h' = n + z ⊙ (h − n)
    let diff = tape.sub(h_prev, n)?;
    let zd = tape.mul(z, diff)?;
    tape.add(n, zd)
}
