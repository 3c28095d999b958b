//! Multitask content selection: a hierarchical BiGRU encoder–decoder trained
//! jointly on generation and on sentence labelling, whose classifier output and
//! decoder attention are fused into a sentence ranking.

mod beam;
mod model;
mod scores;
mod train;
mod vocab;

pub use beam::{beam_search, BeamConfig, BeamOutput};
pub use model::{
    is_label_only, is_seq2seq_only, make_labels, EncodedDoc, Encoded, McsConfig, McsExample,
    McsModel,
};
pub use scores::{inference_scores, rank_normalize, recall_rate, McsScores, RecallReport};
pub use train::{train, LossPoint, TrainConfig, TrainReport};
pub use vocab::{Vocab, BOS, EOS, PAD, UNK};
