//! Dense `f64` tensors with reverse-mode differentiation.

pub mod finite_diff;
pub mod gru;
pub mod mask;
pub mod tape;
pub mod tensor;

pub use finite_diff::{check_param_grads, finite_diff_grad, relative_error};
pub use gru::{gru_cell, GruParams};
pub use mask::{masked_softmax, Mask};
pub use tape::{sigmoid, Tape, Var};
pub use tensor::{matmul, Tensor};
