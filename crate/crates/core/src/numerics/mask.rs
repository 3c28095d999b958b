use crate::error::{Error, Result};
use crate::numerics::Tensor;

/// Boolean `rows × cols` matrix; `true` marks a permitted entry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mask {
    rows: usize,
    cols: usize,
    allowed: Vec<bool>,
}

impl Mask {
    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> bool) -> Self {
        let mut allowed = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                allowed.push(f(i, j));
            }
        }
        Mask {
            rows,
            cols,
            allowed,
        }
    }

    pub fn full(rows: usize, cols: usize) -> Self {
        Mask {
            rows,
            cols,
            allowed: vec![true; rows * cols],
        }
    }

    /// Lower-triangular mask: query `i` may see keys `j ≤ i`.
    pub fn causal(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| j <= i)
    }

    pub fn diagonal(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| i == j)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.allowed[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[bool] {
        &self.allowed[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.allowed
    }

    /// Number of permitted entries.
    pub fn count(&self) -> usize {
        self.allowed.iter().filter(|&&a| a).count()
    }

    pub fn all(&self) -> bool {
        self.allowed.iter().all(|&a| a)
    }
}

/// Softmax over the last dimension restricted to permitted entries.
///
/// Masked entries come out as exactly `0.0`. Rows are stabilized by subtracting
/// the row maximum over permitted entries.
pub fn masked_softmax(logits: &Tensor, mask: &Mask) -> Result<Tensor> {
    let cols = logits.last_dim();
    let rows = logits.leading();
    if mask.cols() != cols || mask.rows() != rows {
        return Err(Error::dim(
            "masked_softmax",
            logits.shape(),
            &[mask.rows(), mask.cols()],
        ));
    }
    let mut out = vec![0.0; logits.numel()];
    for r in 0..rows {
        let x = &logits.data()[r * cols..(r + 1) * cols];
        let m = mask.row(r);
        let max = x
            .iter()
            .zip(m)
            .filter(|(_, &ok)| ok)
            .map(|(&v, _)| v)
            .fold(f64::NEG_INFINITY, f64::max);
        if max == f64::NEG_INFINITY {
            return Err(Error::DegenerateRow { row: r });
        }
        let o = &mut out[r * cols..(r + 1) * cols];
        let mut total = 0.0;
        for j in 0..cols {
            if m[j] {
                let e = (x[j] - max).exp();
                o[j] = e;
                total += e;
            }
        }
        for v in o.iter_mut() {
            *v /= total;
        }
    }
    Tensor::new(logits.shape().to_vec(), out)
}
