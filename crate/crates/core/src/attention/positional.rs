use crate::error::{Error, Result};
use crate::numerics::Tensor;

/// Extends a `[L × d]` positional table to `[target_len × d]` by flip-copying.
///
/// Block `b = p / L` uses `base[p % L]` when `b` is even and
/// `base[L − 1 − p % L]` when odd, so neighbouring blocks meet at equal rows.
pub fn extend_positional_embedding(base: &Tensor, target_len: usize) -> Result<Tensor> {
    if base.shape().len() != 2 || base.shape()[0] == 0 {
        return Err(Error::dim("extend_positional_embedding", base.shape(), &[]));
    }
    let (l, d) = (base.shape()[0], base.shape()[1]);
    if target_len == 0 || !target_len.is_multiple_of(l) {
        return Err(Error::Extension {
            base: l,
            target: target_len,
        });
    }
    let mut data = Vec::with_capacity(target_len * d);
    for p in 0..target_len {
        data.extend_from_slice(base.row(source_row(p, l)));
    }
    Tensor::new(vec![target_len, d], data)
}

/// Base-table row used for extended position `p`.
pub fn source_row(p: usize, l: usize) -> usize {
    let (block, offset) = (p / l, p % l);
    if block % 2 == 0 {
        offset
    } else {
        l - 1 - offset
    }
}
