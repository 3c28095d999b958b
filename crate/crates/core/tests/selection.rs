mod common;

use common::*;
use longsum::metrics::{tokenize, TokenSeq};
use longsum::selection::*;
use longsum::synthetic::{generate, SyntheticConfig};
use proptest::prelude::*;

#[test]
fn contract_holds_on_random_documents() {
    let bad = selection_violations(1000, 51);
    assert!(bad.is_empty(), "{bad:?}");
}

#[test]
fn oracle_ranking_matches_brute_force() {
    assert_eq!(oracle_ranking_mismatches(1000, 52), 0);
}

#[test]
fn hand_enumerated_agorc() {
    let (corpus, want) = hand_agorc_corpus();
    let r = aggressive_fraction(&corpus, 10).unwrap();
    assert_eq!((r.aggressive, r.counted), (2, 4));
    assert_eq!(r.fraction, want);
}

#[test]
fn planted_agorc_matches_relevant_lengths() {
    let docs = generate(&SyntheticConfig::default(), 9).unwrap();
    let budget = 18;
    // Planted docs: the oracle keeps relevant sentences best-first until one overflows.
    let mut aggressive = 0;
    for d in &docs {
        let lens = d.document().word_counts();
        let reference = d.reference();
        let mut order: Vec<usize> = d.relevant.clone();
        let recall = |i: usize| brute_recall(d.document().sentences[i].tokens(), reference.tokens(), 2);
        order.sort_by(|&a, &b| recall(b).partial_cmp(&recall(a)).unwrap().then(a.cmp(&b)));
        let mut used = 0;
        for (k, &i) in order.iter().enumerate() {
            if used + lens[i] <= budget {
                used += lens[i];
            } else {
                if k == 0 {
                    used = budget;
                }
                break;
            }
        }
        if used < budget {
            aggressive += 1;
        }
    }
    let corpus: Vec<_> = docs.iter().map(|d| (d.document().clone(), Some(d.reference().clone()))).collect();
    let r = aggressive_fraction(&corpus, budget).unwrap();
    assert_eq!(r.aggressive, aggressive);
    assert!(aggressive > 0 && aggressive < docs.len());
}

#[test]
fn planted_oracle_recall_is_complete() {
    let docs = generate(&SyntheticConfig::default(), 10).unwrap();
    for d in &docs {
        let sel = select(d.document(), Some(d.reference()), Method::OrcNoPad, 1000, 0, None).unwrap();
        assert_eq!(sel.indices, d.relevant);
    }
}

#[test]
fn trc_keeps_documents_that_fit() {
    let d = Document::new("s", vec![tokenize("a b c"), tokenize("d e")]).unwrap();
    let s = select(&d, None, Method::Trc, 5, 0, None).unwrap();
    assert_eq!(s.render(&d), d.sentences);
}

fn doc_strategy() -> impl Strategy<Value = (Vec<Vec<u8>>, Vec<u8>)> {
    let sentence = prop::collection::vec(0u8..6, 1..10);
    (prop::collection::vec(sentence, 1..12), prop::collection::vec(0u8..6, 2..15))
}

fn build((sents, reference): (Vec<Vec<u8>>, Vec<u8>)) -> (Document, TokenSeq) {
    let seq = |s: &[u8]| TokenSeq::from_tokens(&s.iter().map(|c| format!("t{c}")).collect::<Vec<_>>());
    (Document::new("p", sents.iter().map(|s| seq(s)).collect()).unwrap(), seq(&reference))
}

proptest! {
    #[test]
    fn pad_rand_is_a_superset_and_seeded(input in doc_strategy(), budget in 1usize..40, seed in any::<u64>()) {
        let (doc, reference) = build(input);
        let core = select(&doc, Some(&reference), Method::OrcNoPad, budget, seed, None).unwrap();
        let a = select(&doc, Some(&reference), Method::OrcPadRand, budget, seed, None).unwrap();
        let b = select(&doc, Some(&reference), Method::OrcPadRand, budget, seed, None).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert!(core.indices.iter().all(|i| a.indices.contains(i)));
        prop_assert!(a.words_used <= budget && a.words_used >= core.words_used);
    }

    #[test]
    fn model_ranking_ignores_monotone_rescaling(input in doc_strategy(), budget in 1usize..40) {
        let (doc, _) = build(input);
        let scores: Vec<f64> = (0..doc.num_sentences()).map(|i| ((i * 7919) % 13) as f64).collect();
        let warped: Vec<f64> = scores.iter().map(|s| (s * 0.5).exp() - 3.0).collect();
        let a = select(&doc, None, Method::Mcs, budget, 0, Some(&scores)).unwrap();
        let b = select(&doc, None, Method::Mcs, budget, 0, Some(&warped)).unwrap();
        prop_assert_eq!(a, b);
    }
}
