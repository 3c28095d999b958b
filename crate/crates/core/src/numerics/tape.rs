//! Reverse-mode differentiation over a linear tape.
//!
//! Every operation appends a node holding its forward value and the recipe for
//! its adjoint. `backward` walks the nodes in reverse, accumulating gradients
//! additively so fan-out is handled without special cases.

use crate::error::{Error, Result};
use crate::numerics::mask::{masked_softmax, Mask};
use crate::numerics::tensor::{matmul, matmul_nt_into, matmul_tn_into, Tensor};

/// Handle to a node on a [`Tape`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(usize);

impl Var {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Clone, Debug)]
enum Op {
    Leaf,
    MatMul(Var, Var),
    Add(Var, Var),
    Sub(Var, Var),
    Mul(Var, Var),
    /// `[m×n] + [n]`, bias broadcast over rows.
    AddRow(Var, Var),
    Affine(Var, f64),
    Sigmoid(Var),
    Tanh(Var),
    Gelu(Var),
    Relu(Var),
    Clamp(Var, f64, f64),
    Ln(Var),
    Sum(Var),
    Transpose(Var),
    MaskedSoftmax(Var),
    LogSoftmax(Var),
    LayerNorm {
        x: Var,
        gain: Var,
        bias: Var,
        xhat: Vec<f64>,
        inv_std: Vec<f64>,
    },
    GatherRows(Var, Vec<usize>),
    GatherCols(Var, Vec<usize>),
    SliceCols(Var, usize),
    ConcatCols(Vec<Var>),
    ConcatRows(Vec<Var>),
    Reshape(Var),
    Pick(Var, Vec<usize>),
}

#[derive(Clone, Debug)]
struct Node {
    value: Tensor,
    op: Op,
    requires_grad: bool,
}

/// Recorded computation graph plus gradient buffers.
///
/// A tape is single-threaded; build one per forward pass.
#[derive(Default)]
pub struct Tape {
    nodes: Vec<Node>,
    grads: Vec<Option<Tensor>>,
}

const GELU_C: f64 = 0.797_884_560_802_865_4; // sqrt(2/pi)

impl Tape {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn push(&mut self, value: Tensor, op: Op, requires_grad: bool) -> Var {
        self.nodes.push(Node {
            value,
            op,
            requires_grad,
        });
        Var(self.nodes.len() - 1)
    }

    fn tracked(&self, vars: &[Var]) -> bool {
        vars.iter().any(|v| self.nodes[v.0].requires_grad)
    }

    /// A leaf whose gradient is collected by `backward`.
    pub fn param(&mut self, value: Tensor) -> Var {
        self.push(value, Op::Leaf, true)
    }

    /// A leaf with no gradient (inputs, masks, constants).
    pub fn constant(&mut self, value: Tensor) -> Var {
        self.push(value, Op::Leaf, false)
    }

    pub fn value(&self, v: Var) -> &Tensor {
        &self.nodes[v.0].value
    }

    pub fn shape(&self, v: Var) -> &[usize] {
        self.nodes[v.0].value.shape()
    }

    pub fn requires_grad(&self, v: Var) -> bool {
        self.nodes[v.0].requires_grad
    }

    /// Gradient of the last `backward` loss with respect to `v`.
    pub fn grad(&self, v: Var) -> Option<&Tensor> {
        self.grads.get(v.0).and_then(Option::as_ref)
    }

    pub fn zero_grad(&mut self) {
        self.grads.clear();
    }

    pub fn matmul(&mut self, a: Var, b: Var) -> Result<Var> {
        let value = matmul(self.value(a), self.value(b))?;
        let rg = self.tracked(&[a, b]);
        Ok(self.push(value, Op::MatMul(a, b), rg))
    }

    fn same_shape(&self, op: &'static str, a: Var, b: Var) -> Result<()> {
        if self.shape(a) != self.shape(b) {
            return Err(Error::dim(op, self.shape(a), self.shape(b)));
        }
        Ok(())
    }

    pub fn add(&mut self, a: Var, b: Var) -> Result<Var> {
        self.same_shape("add", a, b)?;
        let value = self.value(a).zip_map(self.value(b), |x, y| x + y)?;
        let rg = self.tracked(&[a, b]);
        Ok(self.push(value, Op::Add(a, b), rg))
    }

    pub fn sub(&mut self, a: Var, b: Var) -> Result<Var> {
        self.same_shape("sub", a, b)?;
        let value = self.value(a).zip_map(self.value(b), |x, y| x - y)?;
        let rg = self.tracked(&[a, b]);
        Ok(self.push(value, Op::Sub(a, b), rg))
    }

    /// Elementwise product.
    pub fn mul(&mut self, a: Var, b: Var) -> Result<Var> {
        self.same_shape("mul", a, b)?;
        let value = self.value(a).zip_map(self.value(b), |x, y| x * y)?;
        let rg = self.tracked(&[a, b]);
        Ok(self.push(value, Op::Mul(a, b), rg))
    }

    /// Adds a length-`n` bias to every row of an `[m×n]` tensor.
    pub fn add_row(&mut self, x: Var, bias: Var) -> Result<Var> {
        let n = self.value(x).last_dim();
        if self.value(bias).numel() != n {
            return Err(Error::dim("add_row", self.shape(x), self.shape(bias)));
        }
        let b = self.value(bias).data().to_vec();
        let mut value = self.value(x).clone();
        for row in value.data_mut().chunks_mut(n) {
            for (v, bv) in row.iter_mut().zip(&b) {
                *v += bv;
            }
        }
        let rg = self.tracked(&[x, bias]);
        Ok(self.push(value, Op::AddRow(x, bias), rg))
    }

    /// `scale · x + shift`.
    pub fn affine(&mut self, x: Var, scale: f64, shift: f64) -> Var {
        let value = self.value(x).map(|v| scale * v + shift);
        let rg = self.tracked(&[x]);
        self.push(value, Op::Affine(x, scale), rg)
    }

    pub fn scale(&mut self, x: Var, s: f64) -> Var {
        self.affine(x, s, 0.0)
    }

    fn unary(&mut self, x: Var, f: impl Fn(f64) -> f64, op: Op) -> Var {
        let value = self.value(x).map(f);
        let rg = self.tracked(&[x]);
        self.push(value, op, rg)
    }

    pub fn sigmoid(&mut self, x: Var) -> Var {
        self.unary(x, sigmoid, Op::Sigmoid(x))
    }

    pub fn tanh(&mut self, x: Var) -> Var {
        self.unary(x, f64::tanh, Op::Tanh(x))
    }

    /// Tanh-approximated GELU.
    pub fn gelu(&mut self, x: Var) -> Var {
        self.unary(
            x,
            |v| 0.5 * v * (1.0 + (GELU_C * (v + 0.044715 * v * v * v)).tanh()),
            Op::Gelu(x),
        )
    }

    pub fn relu(&mut self, x: Var) -> Var {
        self.unary(x, |v| v.max(0.0), Op::Relu(x))
    }

    /// Limits entries to `[lo, hi]`; clamped entries pass no gradient.
    pub fn clamp(&mut self, x: Var, lo: f64, hi: f64) -> Var {
        self.unary(x, |v| v.clamp(lo, hi), Op::Clamp(x, lo, hi))
    }

    pub fn ln(&mut self, x: Var) -> Var {
        self.unary(x, f64::ln, Op::Ln(x))
    }

    /// Sum of all entries as a scalar.
    pub fn sum(&mut self, x: Var) -> Var {
        let value = Tensor::scalar(self.value(x).sum());
        let rg = self.tracked(&[x]);
        self.push(value, Op::Sum(x), rg)
    }

    pub fn transpose(&mut self, x: Var) -> Result<Var> {
        let value = self.value(x).transpose()?;
        let rg = self.tracked(&[x]);
        Ok(self.push(value, Op::Transpose(x), rg))
    }

    pub fn reshape(&mut self, x: Var, shape: &[usize]) -> Result<Var> {
        let value = self.value(x).reshape(shape)?;
        let rg = self.tracked(&[x]);
        Ok(self.push(value, Op::Reshape(x), rg))
    }

    /// Row-wise softmax over permitted entries; see [`masked_softmax`].
    pub fn masked_softmax(&mut self, x: Var, mask: &Mask) -> Result<Var> {
        let value = masked_softmax(self.value(x), mask)?;
        let rg = self.tracked(&[x]);
        Ok(self.push(value, Op::MaskedSoftmax(x), rg))
    }

    pub fn softmax(&mut self, x: Var) -> Result<Var> {
        let t = self.value(x);
        let mask = Mask::full(t.leading(), t.last_dim());
        self.masked_softmax(x, &mask)
    }

    /// Row-wise log-softmax over the last dimension.
    pub fn log_softmax(&mut self, x: Var) -> Var {
        let t = self.value(x);
        let n = t.last_dim();
        let mut out = t.data().to_vec();
        for row in out.chunks_mut(n) {
            let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let lse = row.iter().map(|v| (v - max).exp()).sum::<f64>().ln() + max;
            for v in row.iter_mut() {
                *v -= lse;
            }
        }
        let value = Tensor::new(t.shape().to_vec(), out).expect("same shape");
        let rg = self.tracked(&[x]);
        self.push(value, Op::LogSoftmax(x), rg)
    }

    /// Layer normalization over the last dimension with learned gain and bias.
    pub fn layer_norm(&mut self, x: Var, gain: Var, bias: Var, eps: f64) -> Result<Var> {
        let n = self.value(x).last_dim();
        if self.value(gain).numel() != n || self.value(bias).numel() != n {
            return Err(Error::dim("layer_norm", self.shape(x), self.shape(gain)));
        }
        let xs = self.value(x);
        let g = self.value(gain).data();
        let b = self.value(bias).data();
        let rows = xs.leading();
        let mut xhat = vec![0.0; xs.numel()];
        let mut inv_std = vec![0.0; rows];
        let mut out = vec![0.0; xs.numel()];
        for r in 0..rows {
            let row = &xs.data()[r * n..(r + 1) * n];
            let mean = row.iter().sum::<f64>() / n as f64;
            let var = row.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
            let inv = 1.0 / (var + eps).sqrt();
            inv_std[r] = inv;
            for j in 0..n {
                let h = (row[j] - mean) * inv;
                xhat[r * n + j] = h;
                out[r * n + j] = g[j] * h + b[j];
            }
        }
        let value = Tensor::new(xs.shape().to_vec(), out)?;
        let rg = self.tracked(&[x, gain, bias]);
        Ok(self.push(
            value,
            Op::LayerNorm {
                x,
                gain,
                bias,
                xhat,
                inv_std,
            },
            rg,
        ))
    }

    /// Selects rows of a 2-D tensor (embedding lookup).
    pub fn gather_rows(&mut self, x: Var, idx: &[usize]) -> Result<Var> {
        let t = self.value(x);
        if t.shape().len() != 2 {
            return Err(Error::dim("gather_rows", t.shape(), &[]));
        }
        let (r, c) = (t.shape()[0], t.shape()[1]);
        let mut data = Vec::with_capacity(idx.len() * c);
        for &i in idx {
            if i >= r {
                return Err(Error::dim("gather_rows", t.shape(), &[i]));
            }
            data.extend_from_slice(t.row(i));
        }
        let value = Tensor::new(vec![idx.len(), c], data)?;
        let rg = self.tracked(&[x]);
        Ok(self.push(value, Op::GatherRows(x, idx.to_vec()), rg))
    }

    /// Selects columns of a 2-D tensor.
    pub fn gather_cols(&mut self, x: Var, idx: &[usize]) -> Result<Var> {
        let t = self.value(x);
        if t.shape().len() != 2 {
            return Err(Error::dim("gather_cols", t.shape(), &[]));
        }
        let (r, c) = (t.shape()[0], t.shape()[1]);
        if let Some(&bad) = idx.iter().find(|&&j| j >= c) {
            return Err(Error::dim("gather_cols", t.shape(), &[bad]));
        }
        let mut data = Vec::with_capacity(r * idx.len());
        for i in 0..r {
            let row = t.row(i);
            data.extend(idx.iter().map(|&j| row[j]));
        }
        let value = Tensor::new(vec![r, idx.len()], data)?;
        let rg = self.tracked(&[x]);
        Ok(self.push(value, Op::GatherCols(x, idx.to_vec()), rg))
    }

    /// Columns `start..start + len` of a 2-D tensor.
    pub fn slice_cols(&mut self, x: Var, start: usize, len: usize) -> Result<Var> {
        let t = self.value(x);
        if t.shape().len() != 2 || start + len > t.shape()[1] {
            return Err(Error::dim("slice_cols", t.shape(), &[start, len]));
        }
        let r = t.shape()[0];
        let mut data = Vec::with_capacity(r * len);
        for i in 0..r {
            data.extend_from_slice(&t.row(i)[start..start + len]);
        }
        let value = Tensor::new(vec![r, len], data)?;
        let rg = self.tracked(&[x]);
        Ok(self.push(value, Op::SliceCols(x, start), rg))
    }

    pub fn concat_cols(&mut self, parts: &[Var]) -> Result<Var> {
        let first = parts
            .first()
            .ok_or_else(|| Error::Contract("concat of zero tensors".into()))?;
        let r = self.value(*first).rows();
        let mut widths = Vec::with_capacity(parts.len());
        for &p in parts {
            let t = self.value(p);
            if t.shape().len() != 2 || t.rows() != r {
                return Err(Error::dim("concat_cols", self.shape(*first), t.shape()));
            }
            widths.push(t.cols());
        }
        let total: usize = widths.iter().sum();
        let mut data = Vec::with_capacity(r * total);
        for i in 0..r {
            for &p in parts {
                data.extend_from_slice(self.value(p).row(i));
            }
        }
        let value = Tensor::new(vec![r, total], data)?;
        let rg = self.tracked(parts);
        Ok(self.push(value, Op::ConcatCols(parts.to_vec()), rg))
    }

    pub fn concat_rows(&mut self, parts: &[Var]) -> Result<Var> {
        let first = parts
            .first()
            .ok_or_else(|| Error::Contract("concat of zero tensors".into()))?;
        let c = self.value(*first).cols();
        let mut rows = 0;
        let mut data = Vec::new();
        for &p in parts {
            let t = self.value(p);
            if t.shape().len() != 2 || t.cols() != c {
                return Err(Error::dim("concat_rows", self.shape(*first), t.shape()));
            }
            rows += t.rows();
            data.extend_from_slice(t.data());
        }
        let value = Tensor::new(vec![rows, c], data)?;
        let rg = self.tracked(parts);
        Ok(self.push(value, Op::ConcatRows(parts.to_vec()), rg))
    }

    /// `out[i] = x[i, idx[i]]`, shape `[rows]`.
    pub fn pick(&mut self, x: Var, idx: &[usize]) -> Result<Var> {
        let t = self.value(x);
        if t.rows() != idx.len() || idx.iter().any(|&j| j >= t.cols()) {
            return Err(Error::dim("pick", t.shape(), &[idx.len()]));
        }
        let data = idx.iter().enumerate().map(|(i, &j)| t.at(i, j)).collect();
        let value = Tensor::new(vec![idx.len()], data)?;
        let rg = self.tracked(&[x]);
        Ok(self.push(value, Op::Pick(x, idx.to_vec()), rg))
    }

    /// Populates gradients of `loss` with respect to every tracked node.
    ///
    /// Any previous gradients are discarded first.
    pub fn backward(&mut self, loss: Var) -> Result<()> {
        let shape = self.shape(loss).to_vec();
        if !self.value(loss).is_scalar() {
            return Err(Error::NonScalarLoss { shape });
        }
        self.grads = vec![None; self.nodes.len()];
        self.grads[loss.0] = Some(Tensor::ones(&shape));
        for id in (0..=loss.0).rev() {
            if !self.nodes[id].requires_grad {
                continue;
            }
            let Some(g) = self.grads[id].take() else {
                continue;
            };
            self.propagate(id, &g);
            self.grads[id] = Some(g);
        }
        // Leaves that were never reached still get a zero gradient.
        for (id, node) in self.nodes.iter().enumerate() {
            if node.requires_grad && matches!(node.op, Op::Leaf) && self.grads[id].is_none() {
                self.grads[id] = Some(Tensor::zeros(node.value.shape()));
            }
        }
        Ok(())
    }

    fn accumulate(&mut self, v: Var, g: Tensor) {
        if !self.nodes[v.0].requires_grad {
            return;
        }
        match &mut self.grads[v.0] {
            Some(existing) => existing.add_assign(&g),
            slot @ None => *slot = Some(g),
        }
    }

    fn wants(&self, v: Var) -> bool {
        self.nodes[v.0].requires_grad
    }

    fn propagate(&mut self, id: usize, g: &Tensor) {
        let op = self.nodes[id].op.clone();
        match op {
            Op::Leaf => {}
            Op::MatMul(a, b) => {
                let (m, k) = (self.shape(a)[0], self.shape(a)[1]);
                let n = self.shape(b)[1];
                if self.wants(a) {
                    let mut da = vec![0.0; m * k];
                    matmul_nt_into(g.data(), self.value(b).data(), &mut da, m, n, k);
                    self.accumulate(a, Tensor::new(vec![m, k], da).expect("shape"));
                }
                if self.wants(b) {
                    let mut db = vec![0.0; k * n];
                    matmul_tn_into(self.value(a).data(), g.data(), &mut db, m, k, n);
                    self.accumulate(b, Tensor::new(vec![k, n], db).expect("shape"));
                }
            }
            Op::Add(a, b) => {
                self.accumulate(a, g.clone());
                self.accumulate(b, g.clone());
            }
            Op::Sub(a, b) => {
                self.accumulate(a, g.clone());
                self.accumulate(b, g.map(|v| -v));
            }
            Op::Mul(a, b) => {
                if self.wants(a) {
                    let da = g.zip_map(self.value(b), |x, y| x * y).expect("shape");
                    self.accumulate(a, da);
                }
                if self.wants(b) {
                    let db = g.zip_map(self.value(a), |x, y| x * y).expect("shape");
                    self.accumulate(b, db);
                }
            }
            Op::AddRow(x, bias) => {
                self.accumulate(x, g.clone());
                if self.wants(bias) {
                    let n = g.last_dim();
                    let mut db = vec![0.0; n];
                    for row in g.data().chunks(n) {
                        for (d, v) in db.iter_mut().zip(row) {
                            *d += v;
                        }
                    }
                    let shape = self.shape(bias).to_vec();
                    self.accumulate(bias, Tensor::new(shape, db).expect("shape"));
                }
            }
            Op::Affine(x, s) => self.accumulate(x, g.map(|v| v * s)),
            Op::Sigmoid(x) => {
                let y = &self.nodes[id].value;
                let dx = g.zip_map(y, |gv, yv| gv * yv * (1.0 - yv)).expect("shape");
                self.accumulate(x, dx);
            }
            Op::Tanh(x) => {
                let y = &self.nodes[id].value;
                let dx = g.zip_map(y, |gv, yv| gv * (1.0 - yv * yv)).expect("shape");
                self.accumulate(x, dx);
            }
            Op::Gelu(x) => {
                let dx = g
                    .zip_map(self.value(x), |gv, v| {
                        let u = GELU_C * (v + 0.044715 * v * v * v);
                        let t = u.tanh();
                        let du = GELU_C * (1.0 + 3.0 * 0.044715 * v * v);
                        gv * (0.5 * (1.0 + t) + 0.5 * v * (1.0 - t * t) * du)
                    })
                    .expect("shape");
                self.accumulate(x, dx);
            }
            Op::Relu(x) => {
                let dx = g
                    .zip_map(self.value(x), |gv, v| if v > 0.0 { gv } else { 0.0 })
                    .expect("shape");
                self.accumulate(x, dx);
            }
            Op::Clamp(x, lo, hi) => {
                let dx = g
                    .zip_map(self.value(x), |gv, v| if v > lo && v < hi { gv } else { 0.0 })
                    .expect("shape");
                self.accumulate(x, dx);
            }
            Op::Ln(x) => {
                let dx = g.zip_map(self.value(x), |gv, v| gv / v).expect("shape");
                self.accumulate(x, dx);
            }
            Op::Sum(x) => {
                let gv = g.item();
                let shape = self.shape(x).to_vec();
                self.accumulate(x, Tensor::full(&shape, gv));
            }
            Op::Transpose(x) => self.accumulate(x, g.transpose().expect("2-D")),
            Op::Reshape(x) => {
                let shape = self.shape(x).to_vec();
                self.accumulate(x, g.reshape(&shape).expect("same numel"));
            }
            Op::MaskedSoftmax(x) => {
                let y = &self.nodes[id].value;
                let n = y.last_dim();
                let mut dx = vec![0.0; y.numel()];
                for ((dxr, yr), gr) in dx
                    .chunks_mut(n)
                    .zip(y.data().chunks(n))
                    .zip(g.data().chunks(n))
                {
                    let dot: f64 = yr.iter().zip(gr).map(|(a, b)| a * b).sum();
                    for j in 0..n {
                        dxr[j] = yr[j] * (gr[j] - dot);
                    }
                }
                let shape = y.shape().to_vec();
                self.accumulate(x, Tensor::new(shape, dx).expect("shape"));
            }
            Op::LogSoftmax(x) => {
                let y = &self.nodes[id].value;
                let n = y.last_dim();
                let mut dx = vec![0.0; y.numel()];
                for ((dxr, yr), gr) in dx
                    .chunks_mut(n)
                    .zip(y.data().chunks(n))
                    .zip(g.data().chunks(n))
                {
                    let total: f64 = gr.iter().sum();
                    for j in 0..n {
                        dxr[j] = gr[j] - yr[j].exp() * total;
                    }
                }
                let shape = y.shape().to_vec();
                self.accumulate(x, Tensor::new(shape, dx).expect("shape"));
            }
            Op::LayerNorm {
                x,
                gain,
                bias,
                xhat,
                inv_std,
            } => {
                let n = g.last_dim();
                let gn = self.value(gain).data().to_vec();
                if self.wants(x) {
                    let mut dx = vec![0.0; g.numel()];
                    for (r, inv) in inv_std.iter().enumerate() {
                        let gr = &g.data()[r * n..(r + 1) * n];
                        let hr = &xhat[r * n..(r + 1) * n];
                        let dh: Vec<f64> = gr.iter().zip(&gn).map(|(a, b)| a * b).collect();
                        let sum_dh: f64 = dh.iter().sum();
                        let sum_dh_h: f64 = dh.iter().zip(hr).map(|(a, b)| a * b).sum();
                        for j in 0..n {
                            dx[r * n + j] =
                                inv / n as f64 * (n as f64 * dh[j] - sum_dh - hr[j] * sum_dh_h);
                        }
                    }
                    let shape = self.shape(x).to_vec();
                    self.accumulate(x, Tensor::new(shape, dx).expect("shape"));
                }
                let mut dg = vec![0.0; n];
                let mut db = vec![0.0; n];
                for (gr, hr) in g.data().chunks(n).zip(xhat.chunks(n)) {
                    for j in 0..n {
                        dg[j] += gr[j] * hr[j];
                        db[j] += gr[j];
                    }
                }
                let gs = self.shape(gain).to_vec();
                let bs = self.shape(bias).to_vec();
                self.accumulate(gain, Tensor::new(gs, dg).expect("shape"));
                self.accumulate(bias, Tensor::new(bs, db).expect("shape"));
            }
            Op::GatherRows(x, idx) => {
                if self.wants(x) {
                    let shape = self.shape(x).to_vec();
                    let c = shape[1];
                    let mut dx = Tensor::zeros(&shape);
                    for (k, &i) in idx.iter().enumerate() {
                        let src = &g.data()[k * c..(k + 1) * c];
                        for (d, s) in dx.data_mut()[i * c..(i + 1) * c].iter_mut().zip(src) {
                            *d += s;
                        }
                    }
                    self.accumulate(x, dx);
                }
            }
            Op::GatherCols(x, idx) => {
                if self.wants(x) {
                    let shape = self.shape(x).to_vec();
                    let (r, c) = (shape[0], shape[1]);
                    let w = idx.len();
                    let mut dx = Tensor::zeros(&shape);
                    for i in 0..r {
                        for (k, &j) in idx.iter().enumerate() {
                            dx.data_mut()[i * c + j] += g.data()[i * w + k];
                        }
                    }
                    self.accumulate(x, dx);
                }
            }
            Op::SliceCols(x, start) => {
                if self.wants(x) {
                    let shape = self.shape(x).to_vec();
                    let (r, c) = (shape[0], shape[1]);
                    let w = g.last_dim();
                    let mut dx = Tensor::zeros(&shape);
                    for i in 0..r {
                        dx.data_mut()[i * c + start..i * c + start + w]
                            .copy_from_slice(&g.data()[i * w..(i + 1) * w]);
                    }
                    self.accumulate(x, dx);
                }
            }
            Op::ConcatCols(parts) => {
                let r = g.rows();
                let total = g.cols();
                let mut offset = 0;
                for p in parts {
                    let w = self.value(p).cols();
                    if self.wants(p) {
                        let mut d = Vec::with_capacity(r * w);
                        for i in 0..r {
                            d.extend_from_slice(&g.data()[i * total + offset..i * total + offset + w]);
                        }
                        self.accumulate(p, Tensor::new(vec![r, w], d).expect("shape"));
                    }
                    offset += w;
                }
            }
            Op::ConcatRows(parts) => {
                let mut offset = 0;
                for p in parts {
                    let n = self.value(p).numel();
                    if self.wants(p) {
                        let shape = self.shape(p).to_vec();
                        let d = g.data()[offset..offset + n].to_vec();
                        self.accumulate(p, Tensor::new(shape, d).expect("shape"));
                    }
                    offset += n;
                }
            }
            Op::Pick(x, idx) => {
                let shape = self.shape(x).to_vec();
                let c = *shape.last().expect("2-D");
                let mut dx = Tensor::zeros(&shape);
                for (i, &j) in idx.iter().enumerate() {
                    dx.data_mut()[i * c + j] += g.data()[i];
                }
                self.accumulate(x, dx);
            }
        }
    }
}

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}
