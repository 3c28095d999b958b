use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::TokenSeq;

pub const PAD: usize = 0;
pub const BOS: usize = 1;
pub const EOS: usize = 2;
pub const UNK: usize = 3;
const SPECIALS: [&str; 4] = ["<pad>", "<s>", "</s>", "<unk>"];

/// Word-level vocabulary; ids 0–3 are the special tokens.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct Vocab {
    words: Vec<String>,
    index: BTreeMap<String, usize>,
}

impl Vocab {
    /// Builds from token counts: most frequent first, ties alphabetical, capped at `max_size` ids.
    pub fn build<'a, I>(texts: I, max_size: usize) -> Result<Self>
    where
        I: IntoIterator<Item = &'a TokenSeq>,
    {
        if max_size <= SPECIALS.len() {
            return Err(Error::Domain(format!(
                "vocabulary size {max_size} leaves no room beyond the special tokens"
            )));
        }
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        for t in texts {
            for w in t.tokens() {
                *counts.entry(w.as_str()).or_default() += 1;
            }
        }
        let mut ranked: Vec<(&str, usize)> = counts.into_iter().collect();
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
        let words = SPECIALS
            .iter()
            .map(|s| s.to_string())
            .chain(ranked.into_iter().map(|(w, _)| w.to_string()))
            .take(max_size)
            .collect();
        Self::from_words(words)
    }

    pub fn from_words(words: Vec<String>) -> Result<Self> {
        if words.len() < SPECIALS.len() || words[..SPECIALS.len()] != SPECIALS {
            return Err(Error::Format("vocabulary must start with the special tokens".into()));
        }
        let mut index = BTreeMap::new();
        for (i, w) in words.iter().enumerate() {
            if index.insert(w.clone(), i).is_some() {
                return Err(Error::Format(format!("duplicate vocabulary entry `{w}`")));
            }
        }
        Ok(Vocab { words, index })
    }

    /// Prepends the special tokens to `words`.
    pub fn with_specials<I: IntoIterator<Item = String>>(words: I) -> Result<Self> {
        Self::from_words(SPECIALS.iter().map(|s| s.to_string()).chain(words).collect())
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn id(&self, word: &str) -> usize {
        self.index.get(word).copied().unwrap_or(UNK)
    }

    pub fn word(&self, id: usize) -> Option<&str> {
        self.words.get(id).map(String::as_str)
    }

    pub fn encode(&self, seq: &TokenSeq) -> Vec<usize> {
        seq.tokens().iter().map(|w| self.id(w)).collect()
    }

    /// Decodes ids, skipping special tokens.
    pub fn decode(&self, ids: &[usize]) -> Vec<String> {
        ids.iter()
            .filter(|&&i| i >= SPECIALS.len())
            .filter_map(|&i| self.word(i).map(str::to_string))
            .collect()
    }
}

impl TryFrom<Vec<String>> for Vocab {
    type Error = Error;

    fn try_from(v: Vec<String>) -> Result<Self> {
        Vocab::from_words(v)
    }
}

impl From<Vocab> for Vec<String> {
    fn from(v: Vocab) -> Self {
        v.words
    }
}
