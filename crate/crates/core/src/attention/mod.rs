//! Windowed and full self-attention, the toy encoder–decoder, flip-extended
//! positional tables, and the mean attention distance diagnostic.

pub mod distance;
pub mod mask;
pub mod mha;
pub mod positional;
pub mod toy;

pub use distance::{mean_attention_distance, uniform_distance, uniform_map};
pub use mask::{build_local_mask, Window};
pub use mha::{collect_map, multi_head_attention, AttentionMap, AttentionParams};
pub use positional::extend_positional_embedding;
pub use toy::{EncoderOutput, ToyModelConfig, ToyTransformer};
