//! ROUGE-N and ROUGE-L over token sequences, and the tokenizer that produces them.
//!
//! Scores are unstemmed and computed over this crate's own tokenizer, so they
//! are comparable with each other but not with the perl ROUGE toolkit.

mod rouge;
mod tokenize;

pub use rouge::{
    lcs_len, ngram_precision, ngram_recall, rouge_l, rouge_n, rouge_suite, RougeScore, RougeSuite,
};
pub use tokenize::{split_sentences, tokenize, TokenSeq};

/// The similarity `d(x, y)`: ROUGE-2 recall of sentence `x` against reference `y`.
pub fn similarity(sentence: &TokenSeq, reference: &TokenSeq) -> f64 {
    ngram_recall(sentence.tokens(), reference.tokens(), 2).expect("n = 2")
}
