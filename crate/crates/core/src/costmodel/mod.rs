//! Fitted training-memory models for full and local attention and the
//! hierarchical RNN, plus least-squares refitting and budget advice.

mod advise;
mod coefficients;
mod fit;
mod memory;

pub use advise::{advise_operating_point, Advice, Candidate, OperatingPoint};
pub use coefficients::{CoefficientSet, CostCoefficients, ModelKind, DEFAULT_COEFFICIENTS};
pub use fit::{fit_coefficients, predict, Fit, Sample};
pub use memory::{
    bart_memory, breakeven_width, hier_rnn_memory, lobart_memory, lobart_param_count,
    model_optimizer_memory, HierWorkload, MemoryBreakdown, MemoryTerm, ModelMemory, Workload,
    BART_LARGE_PARAMS, GIB,
};
