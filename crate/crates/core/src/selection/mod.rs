//! Content selection: rank sentences, keep as many as fit a word budget,
//! and restore their document order.

mod corpus;
mod rank;
mod types;
mod walk;

use serde::{Deserialize, Serialize};

pub use corpus::{parse_corpus, CorpusRecord, ParsedLine, SelectionRecord};
pub use rank::{rank_model, rank_oracle, rank_trc, FixedScores, SentenceScorer};
pub use types::{Document, RankMethod, Ranking, Selection};
pub use walk::{aggressive_fraction, pad_selection, truncate_and_sort, AggressiveReport, PadMode};

use crate::error::{Error, Result};
use crate::metrics::TokenSeq;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Trc,
    OrcNoPad,
    OrcPadLead,
    OrcPadRand,
    Mcs,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Trc,
        Method::OrcNoPad,
        Method::OrcPadLead,
        Method::OrcPadRand,
        Method::Mcs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Trc => "trc",
            Method::OrcNoPad => "orc-no-pad",
            Method::OrcPadLead => "orc-pad-lead",
            Method::OrcPadRand => "orc-pad-rand",
            Method::Mcs => "mcs",
        }
    }

    pub fn needs_reference(self) -> bool {
        matches!(self, Method::OrcNoPad | Method::OrcPadLead | Method::OrcPadRand)
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Input(format!("unknown selection method `{s}`")))
    }
}

/// Runs one selection method end to end on a document.
///
/// `scores` supplies the per-sentence model scores for [`Method::Mcs`].
pub fn select(
    doc: &Document,
    reference: Option<&TokenSeq>,
    method: Method,
    budget: usize,
    seed: u64,
    scores: Option<&[f64]>,
) -> Result<Selection> {
    let need_ref = || {
        reference.ok_or_else(|| Error::Input(format!("`{method}` needs a reference for `{}`", doc.id)))
    };
    match method {
        Method::Trc => truncate_and_sort(doc, &rank_trc(doc), budget),
        Method::Mcs => {
            let scores = scores
                .ok_or_else(|| Error::Input(format!("`mcs` needs model scores for `{}`", doc.id)))?;
            truncate_and_sort(doc, &rank_model(doc, &FixedScores(scores.to_vec()))?, budget)
        }
        Method::OrcNoPad | Method::OrcPadLead | Method::OrcPadRand => {
            let core = truncate_and_sort(doc, &rank_oracle(doc, need_ref()?, false)?, budget)?;
            match method {
                Method::OrcPadLead => pad_selection(&core, doc, PadMode::Lead, budget, seed),
                Method::OrcPadRand => pad_selection(&core, doc, PadMode::Rand, budget, seed),
                _ => Ok(core),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::tokenize;

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("orc".parse::<Method>().is_err());
    }

    #[test]
    fn dispatch_requirements() {
        let d = Document::new("a", vec![tokenize("a b"), tokenize("c d")]).unwrap();
        assert!(select(&d, None, Method::OrcNoPad, 5, 0, None).is_err());
        assert!(select(&d, None, Method::Mcs, 5, 0, None).is_err());
        let s = select(&d, None, Method::Mcs, 2, 0, Some(&[0.1, 0.9])).unwrap();
        assert_eq!(s.indices, vec![1]);
        let r = tokenize("c d");
        let lead = select(&d, Some(&r), Method::OrcPadLead, 4, 0, None).unwrap();
        assert_eq!(lead.indices, vec![0, 1]);
    }
}
