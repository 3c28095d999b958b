use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RougeScore {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl RougeScore {
    pub fn from_pr(precision: f64, recall: f64) -> Self {
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        RougeScore { precision, recall, f1 }
    }

    fn from_counts(matched: usize, cand_total: usize, ref_total: usize) -> Self {
        let ratio = |d: usize| if d == 0 { 0.0 } else { matched as f64 / d as f64 };
        Self::from_pr(ratio(cand_total), ratio(ref_total))
    }
}

/// Sorted n-grams of `seq`; empty when `seq` is shorter than `n`.
fn sorted_ngrams<T: Ord>(seq: &[T], n: usize) -> Vec<&[T]> {
    let mut grams: Vec<&[T]> = seq.windows(n).collect();
    grams.sort_unstable();
    grams
}

/// Clipped n-gram match count between two sequences, with each side's total.
fn ngram_overlap<T: Ord>(cand: &[T], reference: &[T], n: usize) -> (usize, usize, usize) {
    let c = sorted_ngrams(cand, n);
    let r = sorted_ngrams(reference, n);
    let (mut i, mut j, mut matched) = (0, 0, 0);
    // Merging two sorted multisets: each equal pair consumes one from each side,
    // which is exactly min(count_c, count_r) per distinct gram.
    while i < c.len() && j < r.len() {
        match c[i].cmp(r[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                matched += 1;
                i += 1;
                j += 1;
            }
        }
    }
    (matched, c.len(), r.len())
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("n-gram order must be at least 1".into()));
    }
    Ok(())
}

/// ROUGE-N precision, recall and F1 with clipped counts.
pub fn rouge_n<T: Ord>(cand: &[T], reference: &[T], n: usize) -> Result<RougeScore> {
    check_n(n)?;
    let (m, c, r) = ngram_overlap(cand, reference, n);
    Ok(RougeScore::from_counts(m, c, r))
}

/// Clipped n-gram matches over reference n-grams; 0 when the reference has fewer than `n` tokens.
pub fn ngram_recall<T: Ord>(cand: &[T], reference: &[T], n: usize) -> Result<f64> {
    Ok(rouge_n(cand, reference, n)?.recall)
}

pub fn ngram_precision<T: Ord>(cand: &[T], reference: &[T], n: usize) -> Result<f64> {
    Ok(rouge_n(cand, reference, n)?.precision)
}

/// Length of the longest common subsequence.
pub fn lcs_len<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    if a.is_empty() || b.is_empty() {
        return 0;
    }
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            cur[j + 1] = if x == y {
                prev[j] + 1
            } else {
                cur[j].max(prev[j + 1])
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// ROUGE-L from the longest common subsequence.
pub fn rouge_l<T: PartialEq>(cand: &[T], reference: &[T]) -> RougeScore {
    RougeScore::from_counts(lcs_len(cand, reference), cand.len(), reference.len())
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RougeSuite {
    pub rouge1: RougeScore,
    pub rouge2: RougeScore,
    pub rouge_l: RougeScore,
}

pub fn rouge_suite<T: Ord>(cand: &[T], reference: &[T]) -> RougeSuite {
    RougeSuite {
        rouge1: rouge_n(cand, reference, 1).expect("n = 1"),
        rouge2: rouge_n(cand, reference, 2).expect("n = 2"),
        rouge_l: rouge_l(cand, reference),
    }
}
