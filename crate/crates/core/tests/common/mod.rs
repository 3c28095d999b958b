//! Shared oracles for the integration suites.
#![allow(dead_code)]

use std::collections::BTreeMap;

use longsum::attention::{multi_head_attention, AttentionParams, ToyModelConfig, ToyTransformer, Window};
use longsum::mcs::{McsConfig, McsModel, Vocab};
use longsum::metrics::{tokenize, TokenSeq};
use longsum::numerics::{check_param_grads, gru_cell, GruParams, Mask, Tape, Tensor, Var};
use longsum::params::{Bound, ParamStore};
use longsum::selection::Document;
use longsum::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const FD_STEP: f64 = 1e-4;
pub const GRAD_TOL: f64 = 1e-4;

/// Largest per-parameter relative error between backward and central differences.
pub fn grad_error<F>(store: &ParamStore, build: F) -> f64
where
    F: Fn(&mut Tape, &Bound) -> Result<Var>,
{
    let mut tape = Tape::new();
    let b = store.bind(&mut tape);
    let loss = build(&mut tape, &b).unwrap();
    tape.backward(loss).unwrap();
    let grads = b.grads(&tape);
    let errs = check_param_grads(
        store,
        &grads,
        |s| {
            let mut t = Tape::new();
            let b = s.bind_frozen(&mut t);
            let l = build(&mut t, &b)?;
            Ok(t.value(l).item())
        },
        FD_STEP,
        24,
    )
    .unwrap();
    errs.values().copied().fold(0.0, f64::max)
}

fn random_mask(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Mask {
    let keep: Vec<Vec<bool>> = (0..rows)
        .map(|_| {
            let mut r: Vec<bool> = (0..cols).map(|_| rng.gen_bool(0.6)).collect();
            let j = rng.gen_range(0..cols);
            r[j] = true;
            r
        })
        .collect();
    Mask::from_fn(rows, cols, |i, j| keep[i][j])
}

fn weighted_sum(tape: &mut Tape, x: Var, c: &Tensor) -> Result<Var> {
    let c = tape.constant(c.clone());
    let p = tape.mul(x, c)?;
    Ok(tape.sum(p))
}

pub fn masked_softmax_error(seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut store = ParamStore::new();
    store.insert("x", Tensor::uniform(&[5, 7], 2.0, &mut rng));
    let mask = random_mask(5, 7, &mut rng);
    let c = Tensor::uniform(&[5, 7], 1.0, &mut rng);
    grad_error(&store, |t, b| {
        let s = t.masked_softmax(b.get("x")?, &mask)?;
        weighted_sum(t, s, &c)
    })
}

pub fn mha_error(seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut store = ParamStore::new();
    AttentionParams::init(&mut store, "att", 8, &mut rng);
    store.insert("q", Tensor::uniform(&[5, 8], 1.0, &mut rng));
    store.insert("kv", Tensor::uniform(&[6, 8], 1.0, &mut rng));
    let mask = random_mask(5, 6, &mut rng);
    let c = Tensor::uniform(&[5, 8], 1.0, &mut rng);
    grad_error(&store, |t, b| {
        let p = AttentionParams::bind(b, "att")?;
        let (q, kv) = (b.get("q")?, b.get("kv")?);
        let (out, _) = multi_head_attention(t, q, kv, kv, &mask, &p, 2)?;
        weighted_sum(t, out, &c)
    })
}

pub fn toy_seq2seq_error(seed: u64) -> f64 {
    let cfg = ToyModelConfig {
        vocab: 20,
        d_model: 8,
        n_heads: 2,
        encoder_layers: 2,
        decoder_layers: 2,
        ffn_dim: 12,
        base_positions: 8,
        max_source: 16,
        max_target: 8,
        window: Window::Local(4),
    };
    let model = ToyTransformer::new(cfg, seed).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed + 1);
    let src: Vec<usize> = (0..10).map(|_| rng.gen_range(4..20)).collect();
    let tgt: Vec<usize> = (0..5).map(|_| rng.gen_range(4..20)).collect();
    grad_error(&model.params, |t, b| model.loss(t, b, &src, &tgt))
}

pub fn gru_error(seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut store = ParamStore::new();
    GruParams::init(&mut store, "g", 4, 5, &mut rng);
    store.insert("x", Tensor::uniform(&[3, 4], 1.0, &mut rng));
    store.insert("h", Tensor::uniform(&[3, 5], 1.0, &mut rng));
    let c = Tensor::uniform(&[3, 5], 1.0, &mut rng);
    grad_error(&store, |t, b| {
        let p = GruParams::bind(b, "g")?;
        let h = gru_cell(t, b.get("x")?, b.get("h")?, &p)?;
        weighted_sum(t, h, &c)
    })
}

/// A four-sentence document at a size where every coordinate can be probed.
pub fn tiny_mcs(seed: u64) -> (McsModel, Document, TokenSeq) {
    let doc = Document::new(
        "g",
        vec![
            tokenize("the cat sat"),
            tokenize("on a mat today"),
            tokenize("dogs bark"),
            tokenize("the cat slept on a mat"),
        ],
    )
    .unwrap();
    let reference = tokenize("the cat sat on a mat");
    let vocab = Vocab::build(doc.sentences.iter().chain([&reference]), 64).unwrap();
    let cfg = McsConfig {
        embed: 4,
        hidden: 3,
        word_layers: 2,
        sent_layers: 2,
        ..McsConfig::default()
    };
    (McsModel::new(cfg, vocab, seed).unwrap(), doc, reference)
}

pub fn mcs_error(gamma: f64, seed: u64) -> f64 {
    let (model, doc, reference) = tiny_mcs(seed);
    let ex = model.example(&doc, &reference).unwrap();
    grad_error(&model.params, |t, b| {
        let enc = model.encode(t, b, &ex.doc, None)?;
        model.mcs_loss(t, b, &enc, &ex.target, &ex.labels, gamma)
    })
}

/// Analytic gradients of `L_MCS` keyed by parameter name.
pub fn mcs_grads(gamma: f64, seed: u64) -> BTreeMap<String, Tensor> {
    let (model, doc, reference) = tiny_mcs(seed);
    let ex = model.example(&doc, &reference).unwrap();
    let mut tape = Tape::new();
    let b = model.params.bind(&mut tape);
    let enc = model.encode(&mut tape, &b, &ex.doc, None).unwrap();
    let l = model.mcs_loss(&mut tape, &b, &enc, &ex.target, &ex.labels, gamma).unwrap();
    tape.backward(l).unwrap();
    b.grads(&tape)
}

/// Every gradient check with its worst relative error.
pub fn gradient_suite() -> Vec<(String, f64)> {
    let mut out = vec![
        ("masked softmax".to_string(), masked_softmax_error(1)),
        ("multi-head attention".to_string(), mha_error(2)),
        ("toy seq2seq 2+2".to_string(), toy_seq2seq_error(3)),
        ("gru cell".to_string(), gru_error(4)),
    ];
    for gamma in [0.0, 0.2, 1.0] {
        out.push((format!("mcs loss gamma={gamma}"), mcs_error(gamma, 5)));
    }
    out
}

/// Brute-force mean distance straight from the weighted-average definition.
pub fn brute_distance(attn: &Tensor) -> f64 {
    let n = attn.rows();
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            let d = i.abs_diff(j);
            total += attn.at(i, j) * d as f64;
        }
    }
    total / n as f64
}

/// Row-stochastic random `[n × n]` map.
pub fn random_attention(n: usize, rng: &mut ChaCha8Rng) -> Tensor {
    let mut data = Vec::with_capacity(n * n);
    for _ in 0..n {
        let row: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() + 1e-3).collect();
        let s: f64 = row.iter().sum();
        data.extend(row.into_iter().map(|v| v / s));
    }
    Tensor::new(vec![n, n], data).unwrap()
}

/// Worst gap between local and full encoders over every `N ≤ 64` with `W ≥ 2N − 1`.
pub fn local_full_gap() -> f64 {
    let cfg = ToyModelConfig::default();
    let full = ToyTransformer::new(cfg.clone(), 21).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let mut worst: f64 = 0.0;
    for n in 1..=64usize {
        let tokens: Vec<usize> = (0..n).map(|_| rng.gen_range(4..cfg.vocab)).collect();
        let (a, _) = full.encoder_states(&tokens).unwrap();
        for w in [2 * n - 1, 2 * n + 6] {
            let local = ToyTransformer {
                config: ToyModelConfig { window: Window::Local(w), ..cfg.clone() },
                params: full.params.clone(),
            };
            let (b, _) = local.encoder_states(&tokens).unwrap();
            worst = worst.max(a.max_abs_diff(&b));
        }
    }
    worst
}

/// Random perturbations outside the receptive field; returns the trials whose state moved.
pub fn receptive_field_violations(trials: usize, seed: u64) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = 0;
    for t in 0..trials {
        let layers = rng.gen_range(1..=3);
        let w = rng.gen_range(2..=9);
        let reach = layers * (w / 2);
        let n = rng.gen_range(reach + 2..=64);
        let cfg = ToyModelConfig { encoder_layers: layers, window: Window::Local(w), ..ToyModelConfig::default() };
        let model = ToyTransformer::new(cfg.clone(), t as u64).unwrap();
        // Position 0 always has a far token since n > reach + 1.
        let mut i = rng.gen_range(0..n);
        if (0..n).all(|j| i.abs_diff(j) <= reach) {
            i = 0;
        }
        let far: Vec<usize> = (0..n).filter(|&j| i.abs_diff(j) > reach).collect();
        let base: Vec<usize> = (0..n).map(|_| rng.gen_range(4..cfg.vocab)).collect();
        let mut moved = base.clone();
        for _ in 0..rng.gen_range(1..=3) {
            let j = far[rng.gen_range(0..far.len())];
            moved[j] = 4 + (moved[j] - 4 + rng.gen_range(1..cfg.vocab - 4)) % (cfg.vocab - 4);
        }
        let (a, _) = model.encoder_states(&base).unwrap();
        let (b, _) = model.encoder_states(&moved).unwrap();
        let same = a.row(i).iter().zip(b.row(i)).all(|(x, y)| x.to_bits() == y.to_bits());
        if !same {
            violations += 1;
        }
    }
    violations
}

/// Worst gap between the library distance and [`brute_distance`] on random maps with `N ≤ 64`.
pub fn distance_gap(seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for n in 1..=64 {
        for _ in 0..3 {
            let m = random_attention(n, &mut rng);
            let d = longsum::attention::mean_attention_distance(&m).unwrap();
            worst = worst.max((d - brute_distance(&m)).abs());
        }
    }
    worst
}

/// Published memory per configuration at `M = 144`, `B = 1`: (label, N, W, GiB).
pub const MEMORY_TABLE: [(&str, usize, Option<usize>, f64); 13] = [
    ("BART(1k)", 1024, None, 8.9),
    ("LoBART(2k) W=128", 2048, Some(128), 9.6),
    ("LoBART(2k) W=256", 2048, Some(256), 10.2),
    ("LoBART(2k) W=512", 2048, Some(512), 11.6),
    ("LoBART(2k) W=1024", 2048, Some(1024), 14.2),
    ("BART(2k)", 2048, None, 14.5),
    ("LoBART(4k) W=128", 4096, Some(128), 12.8),
    ("LoBART(4k) W=256", 4096, Some(256), 14.1),
    ("LoBART(4k) W=512", 4096, Some(512), 16.7),
    ("LoBART(4k) W=1024", 4096, Some(1024), 22.0),
    ("LoBART(8k) W=128", 8192, Some(128), 19.3),
    ("LoBART(8k) W=256", 8192, Some(256), 21.1),
    ("LoBART(8k) W=512", 8192, Some(512), 27.1),
];

/// Published BART profile at `N = 1024`, `M = 144`, by term.
pub const BART_PROFILE: [(&str, f64); 6] = [
    ("constant", 6.05),
    ("M", 0.23),
    ("N", 0.84),
    ("MN", 0.21),
    ("M^2", 0.02),
    ("N^2", 1.53),
];

/// Predicted minus published memory for every table row.
pub fn memory_table_gaps() -> Vec<(&'static str, f64, f64)> {
    use longsum::costmodel::{bart_memory, lobart_memory, CostCoefficients};
    let bart = CostCoefficients::bart_default();
    let lobart = CostCoefficients::lobart_default();
    MEMORY_TABLE
        .iter()
        .map(|&(label, n, w, reported)| {
            let total = match w {
                None => bart_memory(n, 144, 1, &bart).unwrap().total,
                Some(w) => lobart_memory(n, 144, w, 1, &lobart).unwrap().total,
            };
            (label, total, total - reported)
        })
        .collect()
}

/// Clipped n-gram recall by direct counting.
pub fn brute_recall<T: PartialEq>(cand: &[T], reference: &[T], n: usize) -> f64 {
    if reference.len() < n {
        return 0.0;
    }
    let grams = |s: &[T]| -> Vec<usize> { (0..s.len().saturating_sub(n - 1)).collect() };
    let same = |a: &[T], i: usize, b: &[T], j: usize| (0..n).all(|k| a[i + k] == b[j + k]);
    let ref_starts = grams(reference);
    let mut matched = 0;
    for (pos, &j) in ref_starts.iter().enumerate() {
        // Count each distinct reference n-gram once, at its first occurrence.
        if ref_starts[..pos].iter().any(|&p| same(reference, p, reference, j)) {
            continue;
        }
        let in_ref = ref_starts.iter().filter(|&&p| same(reference, p, reference, j)).count();
        let in_cand = grams(cand).into_iter().filter(|&p| same(cand, p, reference, j)).count();
        matched += in_ref.min(in_cand);
    }
    matched as f64 / ref_starts.len() as f64
}

/// Random document over a small vocabulary so sentences overlap the reference.
pub fn random_doc(id: usize, rng: &mut ChaCha8Rng) -> (Document, TokenSeq) {
    let words: Vec<String> = (0..8).map(|i| format!("w{i}")).collect();
    let n = rng.gen_range(1..=15);
    let sentences: Vec<TokenSeq> = (0..n)
        .map(|_| {
            let len = rng.gen_range(1..=12);
            TokenSeq::from_tokens(&(0..len).map(|_| words[rng.gen_range(0..8)].clone()).collect::<Vec<_>>())
        })
        .collect();
    let rlen = rng.gen_range(2..=20);
    let reference = TokenSeq::from_tokens(&(0..rlen).map(|_| words[rng.gen_range(0..8)].clone()).collect::<Vec<_>>());
    (Document::new(format!("r{id}"), sentences).unwrap(), reference)
}

/// Checks the selection contract on `docs` random documents; returns failure descriptions.
pub fn selection_violations(docs: usize, seed: u64) -> Vec<String> {
    use longsum::selection::{select, Method, Selection};
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bad = Vec::new();
    for d in 0..docs {
        let (doc, reference) = random_doc(d, &mut rng);
        let budget = rng.gen_range(1..=60);
        let pad_seed = rng.gen::<u64>();
        let scores: Vec<f64> = (0..doc.num_sentences()).map(|_| rng.gen()).collect();
        let lens = doc.word_counts();
        let run = |m: Method| select(&doc, Some(&reference), m, budget, pad_seed, Some(&scores)).unwrap();
        let check = |bad: &mut Vec<String>, m: Method, s: &Selection| {
            if !s.indices.windows(2).all(|w| w[0] < w[1]) {
                bad.push(format!("{}: {m} out of order", doc.id));
            }
            if s.words_used > budget {
                bad.push(format!("{}: {m} over budget", doc.id));
            }
            let words: usize = s.indices.iter().map(|&i| lens[i]).sum();
            let expected = if s.truncated { budget } else { words };
            if s.words_used != expected || (s.truncated && s.indices.len() != 1) {
                bad.push(format!("{}: {m} word count", doc.id));
            }
            let rendered: usize = s.render(&doc).iter().map(|t| t.len()).sum();
            if rendered != s.words_used {
                bad.push(format!("{}: {m} render length", doc.id));
            }
        };
        for m in Method::ALL {
            let a = run(m);
            check(&mut bad, m, &a);
            if run(m) != a {
                bad.push(format!("{}: {m} not deterministic", doc.id));
            }
        }
        let core = run(Method::OrcNoPad);
        for m in [Method::OrcPadLead, Method::OrcPadRand] {
            let padded = run(m);
            if !core.indices.iter().all(|i| padded.indices.binary_search(i).is_ok()) {
                bad.push(format!("{}: {m} drops core sentences", doc.id));
            }
        }
        // TRC keeps a prefix of the document.
        let trc = run(Method::Trc);
        if trc.indices.iter().enumerate().any(|(k, &i)| k != i) {
            bad.push(format!("{}: trc is not a prefix", doc.id));
        }
    }
    bad
}

/// Compares the oracle ranking to an independent sort of brute-force recalls.
pub fn oracle_ranking_mismatches(docs: usize, seed: u64) -> usize {
    use longsum::selection::rank_oracle;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mismatches = 0;
    for d in 0..docs {
        let (doc, reference) = random_doc(d, &mut rng);
        let mut expected: Vec<(usize, f64)> = doc
            .sentences
            .iter()
            .enumerate()
            .map(|(i, s)| (i, brute_recall(s.tokens(), reference.tokens(), 2)))
            .filter(|p| p.1 > 0.0)
            .collect();
        // Insertion sort: descending recall, earlier sentence first on ties.
        for a in 1..expected.len() {
            let mut b = a;
            while b > 0 && (expected[b].1 > expected[b - 1].1) {
                expected.swap(b, b - 1);
                b -= 1;
            }
        }
        let got = rank_oracle(&doc, &reference, false).unwrap();
        let want: Vec<usize> = expected.iter().map(|p| p.0).collect();
        let scores_agree = got.scores.iter().zip(&expected).all(|(a, b)| (a - b.1).abs() < 1e-15);
        if got.indices != want || !scores_agree {
            mismatches += 1;
        }
    }
    mismatches
}

/// A planted corpus small enough to enumerate by hand, with its `%AgORC` at budget 10.
///
/// | doc | positive sentences (words) | oracle keeps | < 10? |
/// |-----|----------------------------|--------------|-------|
/// | a   | 0 (3), 2 (4)               | 7            | yes   |
/// | b   | 1 (6), 3 (5)               | 6 (5 overflows) | yes |
/// | c   | 0 (5), 1 (5)               | 10           | no    |
/// | d   | 2 (12)                     | 10 (cut)     | no    |
pub fn hand_agorc_corpus() -> (Vec<(Document, Option<TokenSeq>)>, f64) {
    let doc = |id: &str, s: &[&str]| Document::new(id, s.iter().map(|t| tokenize(t)).collect()).unwrap();
    let corpus = vec![
        (
            doc("a", &["k1 k2 x", "f f f f f", "k3 k4 y z", "g g"]),
            Some(tokenize("k1 k2 k3 k4")),
        ),
        (
            doc("b", &["f f", "k1 k2 k3 k4 k5 f", "g g g", "f k6 k7 k8 g"]),
            Some(tokenize("k1 k2 k3 k4 k5 k6 k7 k8")),
        ),
        (
            doc("c", &["k1 k2 f f f", "g g g k3 k4", "f f f"]),
            Some(tokenize("k1 k2 k3 k4")),
        ),
        (
            doc("d", &["f f f", "g g", "k1 k2 k3 k4 k5 k6 f f f f f f"]),
            Some(tokenize("k1 k2 k3 k4 k5 k6")),
        ),
    ];
    (corpus, 0.5)
}

/// Outcome of the exhaustive ROUGE comparison.
#[derive(Debug, Default)]
pub struct RougeSweep {
    pub pairs: u64,
    pub recall_mismatches: u64,
    pub lcs_mismatches: u64,
}

/// Every sequence over `{0, 1, 2}` up to `max_len`, shortest first.
fn all_sequences(max_len: usize) -> Vec<Vec<u8>> {
    let mut out = vec![Vec::new()];
    let mut start = 0;
    for _ in 0..max_len {
        let end = out.len();
        for i in start..end {
            for s in 0..3u8 {
                let mut v = out[i].clone();
                v.push(s);
                out.push(v);
            }
        }
        start = end;
    }
    out
}

/// Compares the library against count tables and subsequence enumeration on every pair.
///
/// Unigram and bigram recall come from per-sequence count vectors. The LCS is
/// the length of the longest subsequence of the candidate that is also a
/// subsequence of the reference, found by enumerating every index subset.
pub fn rouge_sweep(max_len: usize) -> RougeSweep {
    use longsum::metrics::{lcs_len, ngram_recall, rouge_l};
    let seqs = all_sequences(max_len);
    let index_of = |s: &[u8]| -> usize {
        // Offset of the length block plus the base-3 value.
        let offset: usize = (0..s.len()).map(|l| 3usize.pow(l as u32)).sum();
        offset + s.iter().fold(0usize, |acc, &c| acc * 3 + c as usize)
    };
    let words = seqs.len().div_ceil(64);
    // Bitset of all subsequences per sequence, and the same set listed by length.
    let mut subseq = vec![0u64; seqs.len() * words];
    let mut by_len: Vec<Vec<Vec<u32>>> = Vec::with_capacity(seqs.len());
    let mut uni = vec![[0u8; 3]; seqs.len()];
    let mut bi = vec![[0u8; 9]; seqs.len()];
    for (k, s) in seqs.iter().enumerate() {
        assert_eq!(index_of(s), k);
        let mut lists = vec![Vec::new(); s.len() + 1];
        for mask in 0u32..(1 << s.len()) {
            let sub: Vec<u8> = (0..s.len()).filter(|&i| mask >> i & 1 == 1).map(|i| s[i]).collect();
            let j = index_of(&sub);
            let slot = &mut subseq[k * words + j / 64];
            if *slot >> (j % 64) & 1 == 0 {
                *slot |= 1 << (j % 64);
                lists[sub.len()].push(j as u32);
            }
        }
        by_len.push(lists);
        for &c in s {
            uni[k][c as usize] += 1;
        }
        for w in s.windows(2) {
            bi[k][(w[0] * 3 + w[1]) as usize] += 1;
        }
    }
    let lens: Vec<usize> = seqs.iter().map(Vec::len).collect();
    let clipped = |a: &[u8], b: &[u8]| -> usize { a.iter().zip(b).map(|(x, y)| x.min(y)).map(|&v| v as usize).sum() };
    let ratio = |m: usize, d: usize| if d == 0 { 0.0 } else { m as f64 / d as f64 };

    let mut sweep = RougeSweep::default();
    for (c, cand) in seqs.iter().enumerate() {
        for (r, reference) in seqs.iter().enumerate() {
            sweep.pairs += 1;
            let r1 = ratio(clipped(&uni[c], &uni[r]), lens[r]);
            let r2 = ratio(clipped(&bi[c], &bi[r]), lens[r].saturating_sub(1));
            if ngram_recall(cand, reference, 1).unwrap() != r1 || ngram_recall(cand, reference, 2).unwrap() != r2 {
                sweep.recall_mismatches += 1;
            }
            let rb = &subseq[r * words..(r + 1) * words];
            let in_ref = |j: u32| rb[j as usize / 64] >> (j % 64) & 1 == 1;
            let lcs = (0..=lens[c].min(lens[r]))
                .rev()
                .find(|&l| by_len[c][l].iter().any(|&j| in_ref(j)))
                .expect("the empty sequence is common to both");
            let p = ratio(lcs, lens[c]);
            let q = ratio(lcs, lens[r]);
            let f = if p + q > 0.0 { 2.0 * p * q / (p + q) } else { 0.0 };
            let got = rouge_l(cand, reference);
            if lcs_len(cand, reference) != lcs || (got.f1 - f).abs() > 1e-12 || got.recall != q || got.precision != p {
                sweep.lcs_mismatches += 1;
            }
        }
    }
    sweep
}

/// Result of training on the planted corpus and ranking held-out documents.
#[derive(Debug)]
pub struct RecallExperiment {
    pub mcs_percent: f64,
    pub random_percent: f64,
    pub first_loss: f64,
    pub last_loss: f64,
    pub steps: u64,
    pub seconds: f64,
}

pub const RECALL_BUDGET: usize = 20;

/// Mean `%Recall` of rankings drawn uniformly at random, over `trials` shuffles.
pub fn random_recall(docs: &[longsum::synthetic::SyntheticDoc], budget: usize, trials: usize, seed: u64) -> f64 {
    use longsum::mcs::recall_rate;
    use longsum::selection::{select, Method};
    use rand::seq::SliceRandom;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ds: Vec<Document> = docs.iter().map(|d| d.document().clone()).collect();
    let rs: Vec<TokenSeq> = docs.iter().map(|d| d.reference().clone()).collect();
    let mut total = 0.0;
    for _ in 0..trials {
        let sels: Vec<_> = docs
            .iter()
            .map(|d| {
                let mut scores: Vec<f64> = (0..d.document().num_sentences()).map(|i| i as f64).collect();
                scores.shuffle(&mut rng);
                select(d.document(), None, Method::Mcs, budget, 0, Some(&scores)).unwrap()
            })
            .collect();
        total += recall_rate(&sels, &ds, &rs).unwrap().percent;
    }
    total / trials as f64
}

pub fn recall_experiment(config: McsConfig, steps: u64) -> RecallExperiment {
    use longsum::mcs::{inference_scores, recall_rate, train, BeamConfig, TrainConfig};
    use longsum::selection::{select, Method};
    use longsum::synthetic::{generate, vocab, SyntheticConfig};
    let start = std::time::Instant::now();
    let train_docs = generate(&SyntheticConfig::default(), 1).unwrap();
    let test_docs = generate(&SyntheticConfig::default(), 2).unwrap();
    let mut model = McsModel::new(config, vocab(), 0).unwrap();
    let examples: Vec<_> = train_docs.iter().map(|d| model.example(d.document(), d.reference()).unwrap()).collect();
    let report = train(&mut model, &examples, &[], &TrainConfig { steps, ..TrainConfig::default() }).unwrap();
    let beam = BeamConfig::toy(model.config.max_target);
    let sels: Vec<_> = test_docs
        .iter()
        .map(|d| {
            let (scores, _) = inference_scores(&model, d.document(), &beam).unwrap();
            select(d.document(), None, Method::Mcs, RECALL_BUDGET, 0, Some(&scores.fused)).unwrap()
        })
        .collect();
    let ds: Vec<Document> = test_docs.iter().map(|d| d.document().clone()).collect();
    let rs: Vec<TokenSeq> = test_docs.iter().map(|d| d.reference().clone()).collect();
    let mcs = recall_rate(&sels, &ds, &rs).unwrap().percent;
    let window = |a: usize, b: usize| report.curve[a..b].iter().map(|p| p.loss).sum::<f64>() / (b - a) as f64;
    let k = (report.curve.len() / 25).max(1);
    RecallExperiment {
        mcs_percent: mcs,
        random_percent: random_recall(&test_docs, RECALL_BUDGET, 500, 3),
        first_loss: window(0, k),
        last_loss: window(report.curve.len() - k, report.curve.len()),
        steps: report.steps_run,
        seconds: start.elapsed().as_secs_f64(),
    }
}
