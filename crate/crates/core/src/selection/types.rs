use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::TokenSeq;

/// An input document as an ordered list of tokenized sentences.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub sentences: Vec<TokenSeq>,
}

impl Document {
    pub fn new(id: impl Into<String>, sentences: Vec<TokenSeq>) -> Result<Self> {
        let id = id.into();
        if sentences.is_empty() {
            return Err(Error::Input(format!("document `{id}` has no sentences")));
        }
        if sentences.iter().all(TokenSeq::is_empty) {
            return Err(Error::Input(format!("document `{id}` has no words")));
        }
        Ok(Document { id, sentences })
    }

    pub fn num_sentences(&self) -> usize {
        self.sentences.len()
    }

    pub fn word_counts(&self) -> Vec<usize> {
        self.sentences.iter().map(TokenSeq::len).collect()
    }

    pub fn total_words(&self) -> usize {
        self.sentences.iter().map(TokenSeq::len).sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RankMethod {
    /// Original document order.
    Truncation,
    /// Descending model score.
    Model,
    /// Descending ROUGE-2 recall against the reference.
    Oracle,
}

/// Sentence indices (0-based) from best to worst, with the score each was ranked by.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ranking {
    pub indices: Vec<usize>,
    pub scores: Vec<f64>,
    pub method: RankMethod,
}

impl Ranking {
    /// Orders `(index, score)` by descending score, smaller index first on ties.
    pub fn by_score(scored: impl IntoIterator<Item = (usize, f64)>, method: RankMethod) -> Self {
        let mut pairs: Vec<(usize, f64)> = scored.into_iter().collect();
        pairs.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        Ranking {
            indices: pairs.iter().map(|p| p.0).collect(),
            scores: pairs.iter().map(|p| p.1).collect(),
            method,
        }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// Retained sentences in document order under a word budget.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Selection {
    /// Strictly increasing sentence indices.
    pub indices: Vec<usize>,
    pub budget: usize,
    pub words_used: usize,
    /// Set when a single over-budget sentence was cut to the first `budget` words.
    pub truncated: bool,
}

impl Selection {
    pub fn empty(budget: usize) -> Self {
        Selection {
            indices: Vec::new(),
            budget,
            words_used: 0,
            truncated: false,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// The selected text, sentence by sentence.
    pub fn render(&self, doc: &Document) -> Vec<TokenSeq> {
        self.indices
            .iter()
            .map(|&i| {
                let s = &doc.sentences[i];
                if self.truncated {
                    s.prefix(self.budget)
                } else {
                    s.clone()
                }
            })
            .collect()
    }
}
