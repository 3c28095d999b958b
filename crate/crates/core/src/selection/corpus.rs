//! JSON-lines corpus input and selection output.
//!
//! Input lines carry `id`, `sentences` (token arrays or raw strings) or a raw
//! `text` to be split, and an optional `reference`. Output lines carry `id`,
//! `kept_indices` (0-based, ascending), `words_used`, `truncated` and the kept
//! `sentences` as space-joined strings.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{split_sentences, tokenize, TokenSeq};
use crate::selection::types::{Document, Selection};

#[derive(Deserialize)]
#[serde(untagged)]
enum RawText {
    Tokens(Vec<String>),
    Text(String),
}

impl RawText {
    fn into_seq(self) -> TokenSeq {
        match self {
            RawText::Tokens(t) => TokenSeq::from_tokens(&t),
            RawText::Text(s) => tokenize(&s),
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawId {
    Str(String),
    Num(serde_json::Number),
}

#[derive(Deserialize)]
struct RawRecord {
    id: RawId,
    #[serde(default)]
    sentences: Option<Vec<RawText>>,
    #[serde(default)]
    text: Option<String>,
    #[serde(default)]
    reference: Option<RawText>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CorpusRecord {
    pub document: Document,
    pub reference: Option<TokenSeq>,
}

impl CorpusRecord {
    pub fn parse_line(line: &str) -> Result<Self> {
        let raw: RawRecord = serde_json::from_str(line)?;
        let id = match raw.id {
            RawId::Str(s) => s,
            RawId::Num(n) => n.to_string(),
        };
        let sentences = match (raw.sentences, raw.text) {
            (Some(s), _) => s.into_iter().map(RawText::into_seq).collect(),
            (None, Some(t)) => split_sentences(&t),
            (None, None) => {
                return Err(Error::Input(format!("record `{id}` has neither `sentences` nor `text`")))
            }
        };
        let reference = raw.reference.map(RawText::into_seq);
        Ok(CorpusRecord {
            document: Document::new(id, sentences)?,
            reference,
        })
    }

    pub fn to_line(&self) -> String {
        #[derive(Serialize)]
        struct Out<'a> {
            id: &'a str,
            sentences: &'a [TokenSeq],
            #[serde(skip_serializing_if = "Option::is_none")]
            reference: Option<String>,
        }
        serde_json::to_string(&Out {
            id: &self.document.id,
            sentences: &self.document.sentences,
            reference: self.reference.as_ref().map(TokenSeq::join),
        })
        .expect("serializable")
    }
}

/// One parsed line, keyed by its 1-based line number.
pub type ParsedLine = (usize, Result<CorpusRecord>);

/// Parses every non-blank line; malformed lines are returned as errors in place.
pub fn parse_corpus(text: &str) -> Vec<ParsedLine> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| (i + 1, CorpusRecord::parse_line(l)))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectionRecord {
    pub id: String,
    pub kept_indices: Vec<usize>,
    pub words_used: usize,
    pub truncated: bool,
    pub sentences: Vec<String>,
}

impl SelectionRecord {
    pub fn new(doc: &Document, sel: &Selection) -> Self {
        SelectionRecord {
            id: doc.id.clone(),
            kept_indices: sel.indices.clone(),
            words_used: sel.words_used,
            truncated: sel.truncated,
            sentences: sel.render(doc).iter().map(TokenSeq::join).collect(),
        }
    }
}
