use crate::error::{Error, Result};
use crate::numerics::Tensor;

/// Mean attention distance of one head: `(1/N) Σ_i Σ_j α_ij |i − j|`.
///
/// `attn` must be `[N × N]` with rows summing to one (within `1e-6`).
pub fn mean_attention_distance(attn: &Tensor) -> Result<f64> {
    let shape = attn.shape();
    if shape.len() != 2 || shape[0] != shape[1] || shape[0] == 0 {
        return Err(Error::dim("mean_attention_distance", shape, &[]));
    }
    let n = shape[0];
    let mut total = 0.0;
    for i in 0..n {
        let row = attn.row(i);
        let s: f64 = row.iter().sum();
        if (s - 1.0).abs() > 1e-6 {
            return Err(Error::Contract(format!(
                "attention row {i} sums to {s}, not 1"
            )));
        }
        total += row
            .iter()
            .enumerate()
            .map(|(j, &a)| a * i.abs_diff(j) as f64)
            .sum::<f64>();
    }
    Ok(total / n as f64)
}

/// Mean distance under uniform attention, `(N² − 1) / (3N)`.
pub fn uniform_distance(n: usize) -> f64 {
    let n = n as f64;
    (n * n - 1.0) / (3.0 * n)
}

/// Uniform `[N × N]` attention map.
pub fn uniform_map(n: usize) -> Tensor {
    Tensor::full(&[n, n], 1.0 / n as f64)
}
