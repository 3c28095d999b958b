mod common;

use common::*;
use longsum::mcs::*;
use longsum::metrics::similarity;
use longsum::numerics::Tape;
use longsum::optim::learning_rate;
use longsum::synthetic::{generate, vocab, SyntheticConfig};

fn small() -> McsConfig {
    McsConfig { embed: 16, hidden: 16, ..McsConfig::default() }
}

fn corpus_examples(model: &McsModel, seed: u64) -> Vec<McsExample> {
    generate(&SyntheticConfig::default(), seed)
        .unwrap()
        .iter()
        .map(|d| model.example(d.document(), d.reference()).unwrap())
        .collect()
}

#[test]
fn toy_training_halves_the_loss_and_beats_random_recall() {
    let r = recall_experiment(McsConfig { hidden: 32, ..McsConfig::default() }, 500);
    println!("{r:?}");
    assert!(r.last_loss <= 0.5 * r.first_loss, "{r:?}");
    assert!(r.mcs_percent >= 1.5 * r.random_percent, "{r:?}");
}

#[test]
fn training_is_seeded() {
    let run = || {
        let mut m = McsModel::new(small(), vocab(), 4).unwrap();
        let ex = corpus_examples(&m, 1);
        let r = train(&mut m, &ex, &[], &TrainConfig { steps: 15, seed: 9, ..TrainConfig::default() }).unwrap();
        (r, m.params)
    };
    let (ra, pa) = run();
    let (rb, pb) = run();
    assert_eq!(ra, rb);
    assert_eq!(pa, pb);
}

#[test]
fn label_weight_controls_the_classifier_head() {
    let init = McsModel::new(small(), vocab(), 4).unwrap();
    let ex = corpus_examples(&init, 1);
    let head = |gamma: f64| {
        let mut m = init.clone();
        train(&mut m, &ex, &[], &TrainConfig { steps: 10, gamma, ..TrainConfig::default() }).unwrap();
        m.params.get("cls.w").unwrap().clone()
    };
    let h0 = head(0.0);
    let h1 = head(1.0);
    assert_eq!(&h0, init.params.get("cls.w").unwrap());
    assert!(h0.max_abs_diff(&h1) > 0.0);
}

#[test]
fn early_stopping_restores_the_best_check() {
    let mut m = McsModel::new(small(), vocab(), 4).unwrap();
    let ex = corpus_examples(&m, 1);
    let valid = corpus_examples(&m, 2);
    let cfg = TrainConfig { steps: 60, eval_every: 5, patience: 2, lr_scale: 5.0, warmup: 1, ..TrainConfig::default() };
    let r = train(&mut m, &ex, &valid[..4], &cfg).unwrap();
    let best = r.validation.iter().map(|p| p.loss).fold(f64::INFINITY, f64::min);
    let now: f64 = valid[..4].iter().map(|e| m.example_loss(e, cfg.gamma).unwrap()).sum::<f64>() / 4.0;
    assert!((now - best).abs() < 1e-9, "{now} vs {best}");
    if r.stopped_early {
        assert!(r.steps_run < 60);
    }
}

#[test]
fn divergence_is_reported() {
    let mut m = McsModel::new(small(), vocab(), 4).unwrap();
    let ex = corpus_examples(&m, 1);
    m.params.get_mut("out.b").unwrap().data_mut()[7] = f64::NAN;
    let cfg = TrainConfig { steps: 5, ..TrainConfig::default() };
    assert!(matches!(train(&mut m, &ex, &[], &cfg), Err(longsum::Error::Divergence { step: 1, .. })));
}

#[test]
fn schedule_is_continuous_at_warmup() {
    for w in [1u64, 7, 100, 4000] {
        let a = 0.002 * (w as f64).powf(-0.5);
        let b = 0.002 * w as f64 * (w as f64).powf(-1.5);
        let got = learning_rate(w, w, 0.002);
        assert!((got - a).abs() <= 1e-18 && (got - b).abs() <= 1e-18);
    }
}

#[test]
fn labels_agree_with_the_similarity_metric() {
    for d in generate(&SyntheticConfig::default(), 3).unwrap() {
        let labels = make_labels(d.document(), d.reference()).unwrap();
        for (s, &z) in d.document().sentences.iter().zip(&labels) {
            assert_eq!(z, similarity(s, d.reference()) > 0.0);
        }
    }
}

fn banned(tok: usize) -> bool {
    tok == PAD || tok == BOS || tok == UNK
}

fn repeats(tokens: &[usize], next: usize, n: usize) -> bool {
    if tokens.len() + 1 < n {
        return false;
    }
    let mut cand = tokens[tokens.len() + 1 - n..].to_vec();
    cand.push(next);
    tokens.windows(n).any(|w| w == cand.as_slice())
}

/// Step-by-step argmax decoding under the same constraints as the beam.
fn greedy(model: &McsModel, doc: &EncodedDoc, max_len: usize) -> Vec<usize> {
    let mut tape = Tape::new();
    let b = model.params.bind_frozen(&mut tape);
    let enc = model.encode(&mut tape, &b, doc, None).unwrap();
    let mut states = model.decoder_init(&mut tape, &b, &enc).unwrap();
    let mut out = Vec::new();
    for step in 0..max_len {
        let prev = *out.last().unwrap_or(&BOS);
        states = model.decoder_step(&mut tape, &b, &[prev], &states).unwrap();
        let (logits, _) = model.attend(&mut tape, &b, &enc, *states.last().unwrap()).unwrap();
        let row = tape.value(logits).row(0).to_vec();
        let best = (0..row.len())
            .filter(|&t| !banned(t))
            .filter(|&t| step + 1 < max_len || t == EOS)
            .filter(|&t| t == EOS || !repeats(&out, t, 3))
            .max_by(|&a, &c| row[a].total_cmp(&row[c]).then(c.cmp(&a)))
            .unwrap();
        if best == EOS {
            break;
        }
        out.push(best);
    }
    out
}

#[test]
fn width_one_beam_is_greedy() {
    let model = McsModel::new(small(), vocab(), 6).unwrap();
    for d in generate(&SyntheticConfig { docs: 6, ..SyntheticConfig::default() }, 4).unwrap() {
        let enc = model.prepare(d.document()).unwrap();
        let cfg = BeamConfig { width: 1, ..BeamConfig::toy(12) };
        assert_eq!(beam_search(&model, &enc, &cfg).unwrap().tokens, greedy(&model, &enc, 12));
    }
}

#[test]
fn sentence_attention_sums_to_one_every_step() {
    let model = McsModel::new(small(), vocab(), 6).unwrap();
    for d in generate(&SyntheticConfig { docs: 4, ..SyntheticConfig::default() }, 5).unwrap() {
        let out = beam_search(&model, &model.prepare(d.document()).unwrap(), &BeamConfig::toy(10)).unwrap();
        assert_eq!(out.attention.len(), out.tokens.len() + 1);
        for row in &out.attention {
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }
}

#[test]
fn fused_scores_are_bounded_with_one_top_per_channel() {
    let model = McsModel::new(small(), vocab(), 6).unwrap();
    for d in generate(&SyntheticConfig { docs: 4, ..SyntheticConfig::default() }, 6).unwrap() {
        let (s, ranking) = inference_scores(&model, d.document(), &BeamConfig::toy(10)).unwrap();
        assert!(s.fused.iter().all(|f| (0.0..=2.0).contains(f)));
        for channel in [&s.z_hat, &s.attn_mass] {
            let norm = rank_normalize(channel);
            assert_eq!(norm.iter().filter(|&&v| v == 1.0).count(), 1);
        }
        assert_eq!(ranking.indices.len(), d.document().num_sentences());
    }
}

#[test]
fn fusion_ignores_monotone_transforms() {
    let z = vec![0.12, 0.97, 0.45, 0.45, 0.03, 0.61];
    let a = vec![1.3, 0.2, 2.4, 0.9, 0.9, 0.05];
    let base = McsScores::from_channels(z.clone(), a.clone()).ranking();
    let zt: Vec<f64> = z.iter().map(|v| (v / (1.0 - v)).ln()).collect();
    let at: Vec<f64> = a.iter().map(|v| v.powi(3) + 10.0).collect();
    assert_eq!(McsScores::from_channels(zt, at).ranking().indices, base.indices);
}

#[test]
fn perfect_and_random_scorers_bracket_recall() {
    let docs = generate(&SyntheticConfig::default(), 7).unwrap();
    let ds: Vec<_> = docs.iter().map(|d| d.document().clone()).collect();
    let rs: Vec<_> = docs.iter().map(|d| d.reference().clone()).collect();
    let sels: Vec<_> = docs
        .iter()
        .map(|d| {
            let scores: Vec<f64> = (0..d.document().num_sentences())
                .map(|i| if d.relevant.contains(&i) { 1.0 } else { 0.0 })
                .collect();
            longsum::selection::select(d.document(), None, longsum::selection::Method::Mcs, 1000, 0, Some(&scores)).unwrap()
        })
        .collect();
    assert_eq!(recall_rate(&sels, &ds, &rs).unwrap().percent, 100.0);
    // Keeping everything recalls everything; a random ranking with a finite budget sits near the word fraction.
    let random = random_recall(&docs, RECALL_BUDGET, 400, 8);
    let fraction: f64 = docs.iter().map(|d| RECALL_BUDGET as f64 / d.document().total_words() as f64).sum::<f64>()
        / docs.len() as f64;
    assert!((random - 100.0 * fraction).abs() < 15.0, "{random} vs {}", 100.0 * fraction);
}

#[test]
fn checkpoint_preserves_scores() {
    let model = McsModel::new(small(), vocab(), 6).unwrap();
    let dir = tempdir();
    let path = dir.join("mcs.lsnt");
    model.save(&path).unwrap();
    let back = McsModel::load(&path).unwrap();
    let d = &generate(&SyntheticConfig { docs: 1, ..SyntheticConfig::default() }, 8).unwrap()[0];
    let beam = BeamConfig::toy(8);
    assert_eq!(
        inference_scores(&model, d.document(), &beam).unwrap(),
        inference_scores(&back, d.document(), &beam).unwrap()
    );
    std::fs::remove_dir_all(dir).unwrap();
}

fn tempdir() -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("longsum-mcs-it-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
