use crate::error::{Error, Result};
use crate::metrics::{similarity, TokenSeq};
use crate::selection::types::{Document, RankMethod, Ranking};

/// Produces one finite score per sentence; higher is better.
pub trait SentenceScorer {
    fn score(&self, doc: &Document) -> Result<Vec<f64>>;
}

/// A precomputed score list, e.g. read back from a score dump.
#[derive(Clone, Debug, PartialEq)]
pub struct FixedScores(pub Vec<f64>);

impl SentenceScorer for FixedScores {
    fn score(&self, _doc: &Document) -> Result<Vec<f64>> {
        Ok(self.0.clone())
    }
}

impl<F> SentenceScorer for F
where
    F: Fn(&Document) -> Vec<f64>,
{
    fn score(&self, doc: &Document) -> Result<Vec<f64>> {
        Ok(self(doc))
    }
}

pub fn rank_trc(doc: &Document) -> Ranking {
    Ranking {
        indices: (0..doc.num_sentences()).collect(),
        scores: vec![0.0; doc.num_sentences()],
        method: RankMethod::Truncation,
    }
}

/// Ranks by `d(x_i, y)`, keeping only positive-`d` sentences unless `keep_nonpositive`.
pub fn rank_oracle(doc: &Document, reference: &TokenSeq, keep_nonpositive: bool) -> Result<Ranking> {
    if reference.is_empty() {
        return Err(Error::Input(format!("document `{}` has an empty reference", doc.id)));
    }
    let scored = doc
        .sentences
        .iter()
        .enumerate()
        .map(|(i, s)| (i, similarity(s, reference)))
        .filter(|&(_, d)| keep_nonpositive || d > 0.0);
    Ok(Ranking::by_score(scored, RankMethod::Oracle))
}

pub fn rank_model<S: SentenceScorer + ?Sized>(doc: &Document, scorer: &S) -> Result<Ranking> {
    let scores = scorer.score(doc)?;
    if scores.len() != doc.num_sentences() {
        return Err(Error::Scorer(format!(
            "{} scores for {} sentences",
            scores.len(),
            doc.num_sentences()
        )));
    }
    if let Some(i) = scores.iter().position(|s| !s.is_finite()) {
        return Err(Error::Scorer(format!("sentence {i} has non-finite score {}", scores[i])));
    }
    Ok(Ranking::by_score(scores.into_iter().enumerate(), RankMethod::Model))
}
