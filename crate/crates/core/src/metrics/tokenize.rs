use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Lowercase word tokens with punctuation stripped. Never holds an empty token.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct TokenSeq(Vec<String>);

impl TokenSeq {
    /// Wraps tokens that are already normalized.
    pub fn new(tokens: Vec<String>) -> Result<Self> {
        if let Some(i) = tokens.iter().position(|t| t.is_empty()) {
            return Err(Error::Input(format!("token {i} is empty")));
        }
        Ok(TokenSeq(tokens))
    }

    /// Normalizes each pre-split token, dropping any that become empty.
    pub fn from_tokens<S: AsRef<str>>(tokens: &[S]) -> Self {
        TokenSeq(tokens.iter().filter_map(|t| normalize(t.as_ref())).collect())
    }

    pub fn tokens(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The first `n` tokens.
    pub fn prefix(&self, n: usize) -> TokenSeq {
        TokenSeq(self.0[..n.min(self.0.len())].to_vec())
    }

    pub fn join(&self) -> String {
        self.0.join(" ")
    }

    pub fn concat<'a, I: IntoIterator<Item = &'a TokenSeq>>(parts: I) -> TokenSeq {
        TokenSeq(parts.into_iter().flat_map(|p| p.0.iter().cloned()).collect())
    }
}

impl AsRef<[String]> for TokenSeq {
    fn as_ref(&self) -> &[String] {
        &self.0
    }
}

impl TryFrom<Vec<String>> for TokenSeq {
    type Error = Error;

    fn try_from(v: Vec<String>) -> Result<Self> {
        TokenSeq::new(v)
    }
}

impl From<TokenSeq> for Vec<String> {
    fn from(t: TokenSeq) -> Self {
        t.0
    }
}

fn normalize(word: &str) -> Option<String> {
    let w: String = word
        .chars()
        .filter(|c| c.is_alphanumeric())
        .flat_map(char::to_lowercase)
        .collect();
    (!w.is_empty()).then_some(w)
}

/// Lowercases, splits on whitespace and strips punctuation to bare words.
pub fn tokenize(text: &str) -> TokenSeq {
    TokenSeq(text.split_whitespace().filter_map(normalize).collect())
}

/// Splits raw text into sentences at `.`, `!`, `?` and newlines.
pub fn split_sentences(text: &str) -> Vec<TokenSeq> {
    text.split(['.', '!', '?', '\n'])
        .map(tokenize)
        .filter(|s| !s.is_empty())
        .collect()
}
