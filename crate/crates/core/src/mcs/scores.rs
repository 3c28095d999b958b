use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::mcs::beam::{beam_search, BeamConfig};
use crate::mcs::model::McsModel;
use crate::metrics::{similarity, TokenSeq};
use crate::numerics::Tape;
use crate::selection::{Document, RankMethod, Ranking, Selection};

/// Maps raw scores to `(R − rank) / (R − 1)`, rank 1 being the highest score.
///
/// Ties take the order of their indices; a single score maps to 1.0.
pub fn rank_normalize(scores: &[f64]) -> Vec<f64> {
    let r = scores.len();
    if r == 1 {
        return vec![1.0];
    }
    let order = Ranking::by_score(scores.iter().copied().enumerate(), RankMethod::Model).indices;
    let mut out = vec![0.0; r];
    for (pos, &i) in order.iter().enumerate() {
        out[i] = (r - 1 - pos) as f64 / (r - 1) as f64;
    }
    out
}

/// Per-sentence scores of one document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McsScores {
    /// Classifier probability `ẑ_i`.
    pub z_hat: Vec<f64>,
    /// Decoder sentence attention summed over decoded steps.
    pub attn_mass: Vec<f64>,
    /// Sum of the two rank-normalized channels, in `[0, 2]`.
    pub fused: Vec<f64>,
}

impl McsScores {
    pub fn from_channels(z_hat: Vec<f64>, attn_mass: Vec<f64>) -> Self {
        let fused = rank_normalize(&z_hat)
            .into_iter()
            .zip(rank_normalize(&attn_mass))
            .map(|(a, b)| a + b)
            .collect();
        McsScores {
            z_hat,
            attn_mass,
            fused,
        }
    }

    pub fn ranking(&self) -> Ranking {
        Ranking::by_score(self.fused.iter().copied().enumerate(), RankMethod::Model)
    }
}

/// Scores every sentence from the classifier and the top beam's sentence attention.
///
/// Sentences cut by the model's sentence limit score 0 on both channels.
pub fn inference_scores(model: &McsModel, doc: &Document, beam: &BeamConfig) -> Result<(McsScores, Ranking)> {
    let enc = model.prepare(doc)?;
    let mut tape = Tape::new();
    let b = model.params.bind_frozen(&mut tape);
    let states = model.encode(&mut tape, &b, &enc, None)?;
    let z = model.label_probs(&mut tape, &b, &states)?;
    let mut z_hat = tape.value(z).data().to_vec();
    let out = beam_search(model, &enc, beam)?;
    let mut attn_mass = vec![0.0; enc.num_sentences()];
    for row in &out.attention {
        for (m, a) in attn_mass.iter_mut().zip(row) {
            *m += a;
        }
    }
    z_hat.resize(doc.num_sentences(), 0.0);
    attn_mass.resize(doc.num_sentences(), 0.0);
    let scores = McsScores::from_channels(z_hat, attn_mass);
    let ranking = scores.ranking();
    Ok((scores, ranking))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecallReport {
    /// Mean per-document recall of positive-overlap sentences, in percent.
    pub percent: f64,
    pub counted: usize,
    /// Documents with no positive-overlap sentence.
    pub excluded: usize,
}

/// `%Recall`: how many sentences with `d(x_i, y) > 0` each selection retains.
///
/// Returns `None` when no document has a positive-overlap sentence.
pub fn recall_rate(selections: &[Selection], docs: &[Document], references: &[TokenSeq]) -> Option<RecallReport> {
    let mut total = 0.0;
    let mut counted = 0;
    let mut excluded = 0;
    for ((sel, doc), reference) in selections.iter().zip(docs).zip(references) {
        let positive: Vec<usize> = doc
            .sentences
            .iter()
            .enumerate()
            .filter(|(_, s)| similarity(s, reference) > 0.0)
            .map(|(i, _)| i)
            .collect();
        if positive.is_empty() {
            excluded += 1;
            continue;
        }
        let hit = positive.iter().filter(|i| sel.indices.binary_search(i).is_ok()).count();
        total += hit as f64 / positive.len() as f64;
        counted += 1;
    }
    (counted > 0).then(|| RecallReport {
        percent: 100.0 * total / counted as f64,
        counted,
        excluded,
    })
}
