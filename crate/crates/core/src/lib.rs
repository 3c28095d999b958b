//! Long-span summarization building blocks: local windowed self-attention with
//! its memory cost model, and explicit content selection.

pub mod error;
pub mod attention;
pub mod costmodel;
pub mod mcs;
pub mod metrics;
pub mod numerics;
pub mod optim;
pub mod params;
pub mod selection;
pub mod synthetic;

pub use error::{Error, Result};
