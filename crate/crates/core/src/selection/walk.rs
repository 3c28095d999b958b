use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::TokenSeq;
use crate::selection::rank::rank_oracle;
use crate::selection::types::{Document, Ranking, Selection};

fn check_budget(budget: usize) -> Result<()> {
    if budget == 0 {
        return Err(Error::Domain("word budget must be at least 1".into()));
    }
    Ok(())
}

/// Admits `order` into `sel` while the running total stays within budget,
/// stopping at the first sentence that would overflow.
fn admit(sel: &mut Selection, doc: &Document, order: impl IntoIterator<Item = usize>) {
    let lens = doc.word_counts();
    for i in order {
        let len = lens[i];
        if sel.words_used + len <= sel.budget {
            sel.indices.push(i);
            sel.words_used += len;
        } else {
            if sel.indices.is_empty() {
                sel.indices.push(i);
                sel.words_used = sel.budget;
                sel.truncated = true;
            }
            break;
        }
    }
    sel.indices.sort_unstable();
}

/// Walks `ranking` under a word budget, then restores document order.
///
/// An over-budget first sentence is kept, cut to its first `budget` words.
pub fn truncate_and_sort(doc: &Document, ranking: &Ranking, budget: usize) -> Result<Selection> {
    check_budget(budget)?;
    if let Some(&bad) = ranking.indices.iter().find(|&&i| i >= doc.num_sentences()) {
        return Err(Error::Input(format!(
            "ranking refers to sentence {bad} of a {}-sentence document",
            doc.num_sentences()
        )));
    }
    let mut sel = Selection::empty(budget);
    admit(&mut sel, doc, ranking.indices.iter().copied());
    if sel.is_empty() {
        log::debug!("document `{}`: empty selection", doc.id);
    }
    Ok(sel)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PadMode {
    /// Unselected sentences in document order.
    Lead,
    /// Unselected sentences in seeded random order.
    Rand,
}

/// Fills the budget left by `core` with unselected sentences.
pub fn pad_selection(
    core: &Selection,
    doc: &Document,
    mode: PadMode,
    budget: usize,
    seed: u64,
) -> Result<Selection> {
    check_budget(budget)?;
    if core.budget != budget || core.words_used > budget {
        return Err(Error::Contract(format!(
            "core selection ({} words, budget {}) does not fit budget {budget}",
            core.words_used, core.budget
        )));
    }
    if core.truncated {
        return Ok(core.clone());
    }
    let mut rest: Vec<usize> = (0..doc.num_sentences())
        .filter(|i| core.indices.binary_search(i).is_err())
        .collect();
    if mode == PadMode::Rand {
        rest.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    }
    let mut sel = core.clone();
    admit(&mut sel, doc, rest);
    Ok(sel)
}

/// `%AgORC` over a corpus: how often the positive-overlap oracle keeps fewer than `budget` words.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AggressiveReport {
    pub fraction: f64,
    pub aggressive: usize,
    pub counted: usize,
    /// Ids of documents without a usable reference.
    pub skipped: Vec<String>,
}

pub fn aggressive_fraction(
    corpus: &[(Document, Option<TokenSeq>)],
    budget: usize,
) -> Result<AggressiveReport> {
    check_budget(budget)?;
    let mut aggressive = 0;
    let mut counted = 0;
    let mut skipped = Vec::new();
    for (doc, reference) in corpus {
        let ranking = match reference.as_ref().map(|r| rank_oracle(doc, r, false)) {
            Some(Ok(r)) => r,
            Some(Err(e)) => {
                log::warn!("skipping `{}`: {e}", doc.id);
                skipped.push(doc.id.clone());
                continue;
            }
            None => {
                log::warn!("skipping `{}`: no reference", doc.id);
                skipped.push(doc.id.clone());
                continue;
            }
        };
        counted += 1;
        if truncate_and_sort(doc, &ranking, budget)?.words_used < budget {
            aggressive += 1;
        }
    }
    if counted == 0 {
        return Err(Error::Input("no document with a reference".into()));
    }
    Ok(AggressiveReport {
        fraction: aggressive as f64 / counted as f64,
        aggressive,
        counted,
        skipped,
    })
}
