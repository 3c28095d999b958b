//! Seeded synthetic corpora with planted relevant sentences.
//!
//! Words come from two disjoint pools. Relevant sentences embed a contiguous
//! run of key words; the reference concatenates those runs in document order.
//! Every other sentence is filler only, so a sentence shares a bigram with the
//! reference exactly when it is relevant.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mcs::Vocab;
use crate::metrics::TokenSeq;
use crate::selection::{CorpusRecord, Document};

pub const KEY_WORDS: usize = 24;
pub const FILLER_WORDS: usize = 73;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyntheticConfig {
    pub docs: usize,
    pub min_sentences: usize,
    pub max_sentences: usize,
    pub min_relevant: usize,
    pub max_relevant: usize,
    /// Filler sentence length range.
    pub min_words: usize,
    pub max_words: usize,
    /// Key-word run length range inside relevant sentences.
    pub min_run: usize,
    pub max_run: usize,
    /// Filler words around a key-word run, at most this many on each side.
    pub max_padding: usize,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            docs: 20,
            min_sentences: 8,
            max_sentences: 12,
            min_relevant: 2,
            max_relevant: 3,
            min_words: 4,
            max_words: 8,
            min_run: 3,
            max_run: 4,
            max_padding: 2,
        }
    }
}

impl SyntheticConfig {
    fn validate(&self) -> Result<()> {
        let ranges = [
            (self.min_sentences, self.max_sentences),
            (self.min_relevant, self.max_relevant),
            (self.min_words, self.max_words),
            (self.min_run, self.max_run),
        ];
        if ranges.iter().any(|&(lo, hi)| lo > hi) {
            return Err(Error::Domain("synthetic ranges must have min ≤ max".into()));
        }
        if self.min_sentences == 0 || self.min_words == 0 || self.min_run < 2 {
            return Err(Error::Domain(
                "need at least one sentence, one word, and key runs of two words".into(),
            ));
        }
        if self.max_relevant > self.min_sentences || self.max_run > KEY_WORDS {
            return Err(Error::Domain("relevant sentences do not fit the document".into()));
        }
        Ok(())
    }
}

pub fn key_word(i: usize) -> String {
    format!("k{i}")
}

pub fn filler_word(i: usize) -> String {
    format!("f{i}")
}

/// Specials, then key words, then filler words.
pub fn vocab() -> Vocab {
    Vocab::with_specials((0..KEY_WORDS).map(key_word).chain((0..FILLER_WORDS).map(filler_word)))
        .expect("synthetic words are distinct")
}

/// A generated document with its reference and the planted relevant indices.
#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticDoc {
    pub record: CorpusRecord,
    pub relevant: Vec<usize>,
}

impl SyntheticDoc {
    pub fn document(&self) -> &Document {
        &self.record.document
    }

    pub fn reference(&self) -> &TokenSeq {
        self.record.reference.as_ref().expect("synthetic docs carry a reference")
    }
}

pub fn generate(cfg: &SyntheticConfig, seed: u64) -> Result<Vec<SyntheticDoc>> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(cfg.docs);
    for d in 0..cfg.docs {
        let n = rng.gen_range(cfg.min_sentences..=cfg.max_sentences);
        let k = rng.gen_range(cfg.min_relevant..=cfg.max_relevant);
        let mut relevant: Vec<usize> = (0..n).collect::<Vec<_>>().choose_multiple(&mut rng, k).copied().collect();
        relevant.sort_unstable();

        // Distinct key words per document keep runs from sharing bigrams.
        let mut keys: Vec<usize> = (0..KEY_WORDS).collect();
        keys.shuffle(&mut rng);
        let mut keys = keys.into_iter();

        let filler = |rng: &mut ChaCha8Rng, len: usize| -> Vec<String> {
            (0..len).map(|_| filler_word(rng.gen_range(0..FILLER_WORDS))).collect()
        };
        let mut sentences = Vec::with_capacity(n);
        let mut reference = Vec::new();
        for i in 0..n {
            if relevant.binary_search(&i).is_ok() {
                let run_len = rng.gen_range(cfg.min_run..=cfg.max_run);
                let run: Vec<String> = keys.by_ref().take(run_len).map(key_word).collect();
                if run.len() < 2 {
                    return Err(Error::Domain("ran out of key words for this document".into()));
                }
                let before = rng.gen_range(0..=cfg.max_padding);
                let after = rng.gen_range(0..=cfg.max_padding);
                let mut s = filler(&mut rng, before);
                s.extend(run.iter().cloned());
                s.extend(filler(&mut rng, after));
                reference.extend(run);
                sentences.push(TokenSeq::from_tokens(&s));
            } else {
                let len = rng.gen_range(cfg.min_words..=cfg.max_words);
                sentences.push(TokenSeq::from_tokens(&filler(&mut rng, len)));
            }
        }
        let document = Document::new(format!("syn-{d:04}"), sentences)?;
        out.push(SyntheticDoc {
            record: CorpusRecord {
                document,
                reference: Some(TokenSeq::from_tokens(&reference)),
            },
            relevant,
        });
    }
    Ok(out)
}
