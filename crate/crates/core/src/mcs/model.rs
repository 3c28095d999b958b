use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mcs::vocab::{Vocab, BOS, EOS};
use crate::metrics::{similarity, TokenSeq};
use crate::numerics::{gru_cell, GruParams, Tape, Tensor, Var};
use crate::params::{Bound, ParamStore};
use crate::selection::Document;

const LABEL_CLAMP: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McsConfig {
    pub vocab: usize,
    pub embed: usize,
    pub hidden: usize,
    /// Bidirectional word-level GRU layers.
    pub word_layers: usize,
    /// Bidirectional sentence-level GRU layers.
    pub sent_layers: usize,
    pub dec_layers: usize,
    pub dropout: f64,
    /// Weight of the labelling loss in the combined objective.
    pub gamma: f64,
    pub max_sentences: usize,
    pub max_words: usize,
    /// Target length limit, end token included.
    pub max_target: usize,
}

impl Default for McsConfig {
    fn default() -> Self {
        McsConfig {
            vocab: 101,
            embed: 32,
            hidden: 64,
            word_layers: 2,
            sent_layers: 2,
            dec_layers: 1,
            dropout: 0.0,
            gamma: 0.2,
            max_sentences: 16,
            max_words: 12,
            max_target: 16,
        }
    }
}

impl McsConfig {
    /// The published full-scale sizes.
    pub fn full_scale(vocab: usize) -> Self {
        McsConfig {
            vocab,
            embed: 256,
            hidden: 512,
            max_sentences: 1000,
            max_words: 50,
            max_target: 144,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let dims = [
            self.vocab,
            self.embed,
            self.hidden,
            self.word_layers,
            self.sent_layers,
            self.dec_layers,
            self.max_sentences,
            self.max_words,
            self.max_target,
        ];
        if dims.contains(&0) {
            return Err(Error::Domain("MCS dimensions must be positive".into()));
        }
        check_gamma(self.gamma)?;
        if !(0.0..1.0).contains(&self.dropout) {
            return Err(Error::Domain(format!("dropout {} outside [0, 1)", self.dropout)));
        }
        Ok(())
    }
}

pub(crate) fn check_gamma(gamma: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::Domain(format!("gamma {gamma} outside [0, 1]")));
    }
    Ok(())
}

/// A document as clipped word ids, one list per sentence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncodedDoc {
    pub sentences: Vec<Vec<usize>>,
    /// Sentence count before clipping.
    pub original_sentences: usize,
}

impl EncodedDoc {
    pub fn num_sentences(&self) -> usize {
        self.sentences.len()
    }
}

/// Encoder outputs on a tape.
#[derive(Clone, Debug)]
pub struct Encoded {
    /// `[T × 2h]`, one row per word, sentence-major.
    pub word_states: Var,
    word_states_t: Var,
    /// Sentence of each word row.
    pub word_sentence: Vec<usize>,
    /// `[N1 × 2h]`.
    pub sentence_states: Var,
    sentence_states_t: Var,
}

/// One training example: clipped input, target ids ending in the end token, and labels.
#[derive(Clone, Debug, PartialEq)]
pub struct McsExample {
    pub id: String,
    pub doc: EncodedDoc,
    pub target: Vec<usize>,
    pub labels: Vec<bool>,
}

/// `z_i = 1` iff sentence `i` shares at least one bigram with the reference.
pub fn make_labels(doc: &Document, reference: &TokenSeq) -> Result<Vec<bool>> {
    if reference.is_empty() {
        return Err(Error::Input(format!("document `{}` has an empty reference", doc.id)));
    }
    Ok(doc
        .sentences
        .iter()
        .map(|s| similarity(s, reference) > 0.0)
        .collect())
}

/// Hierarchical BiGRU encoder–decoder with an extractive labelling head.
#[derive(Clone, Debug)]
pub struct McsModel {
    pub config: McsConfig,
    pub vocab: Vocab,
    pub params: ParamStore,
}

#[derive(Serialize, Deserialize)]
struct Meta {
    model: String,
    config: McsConfig,
    vocab: Vocab,
}

struct Handles {
    embed: Var,
    word: Vec<(GruParams, GruParams)>,
    sent: Vec<(GruParams, GruParams)>,
    dec: Vec<GruParams>,
    cls_w: Var,
    cls_b: Var,
    init_w: Var,
    init_b: Var,
    att_sent: Var,
    att_word: Var,
    comb_w: Var,
    comb_b: Var,
    out_w: Var,
    out_b: Var,
}

/// Parameter names used only by the generation branch.
pub fn is_seq2seq_only(name: &str) -> bool {
    name.starts_with("dec.") || name.starts_with("att.") || name.starts_with("out.")
}

/// Parameter names used only by the labelling branch.
pub fn is_label_only(name: &str) -> bool {
    name.starts_with("cls.")
}

impl McsModel {
    pub fn new(mut config: McsConfig, vocab: Vocab, seed: u64) -> Result<Self> {
        if config.vocab != vocab.len() {
            log::debug!("vocab size {} overrides configured {}", vocab.len(), config.vocab);
            config.vocab = vocab.len();
        }
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (e, h, v) = (config.embed, config.hidden, config.vocab);
        let mut p = ParamStore::new();
        p.insert("embed", Tensor::uniform(&[v, e], 1.0 / (e as f64).sqrt(), &mut rng));
        for l in 0..config.word_layers {
            let d_in = if l == 0 { e } else { 2 * h };
            GruParams::init(&mut p, &format!("word.{l}.fwd"), d_in, h, &mut rng);
            GruParams::init(&mut p, &format!("word.{l}.bwd"), d_in, h, &mut rng);
        }
        for l in 0..config.sent_layers {
            GruParams::init(&mut p, &format!("sent.{l}.fwd"), 2 * h, h, &mut rng);
            GruParams::init(&mut p, &format!("sent.{l}.bwd"), 2 * h, h, &mut rng);
        }
        for l in 0..config.dec_layers {
            let d_in = if l == 0 { e } else { h };
            GruParams::init(&mut p, &format!("dec.{l}"), d_in, h, &mut rng);
        }
        let s2 = 1.0 / ((2 * h) as f64).sqrt();
        let s1 = 1.0 / (h as f64).sqrt();
        p.insert("cls.w", Tensor::uniform(&[2 * h, 1], s2, &mut rng));
        p.insert("cls.b", Tensor::zeros(&[1]));
        p.insert("dec.init.w", Tensor::uniform(&[2 * h, h], s2, &mut rng));
        p.insert("dec.init.b", Tensor::zeros(&[h]));
        p.insert("att.sent", Tensor::uniform(&[h, 2 * h], s1, &mut rng));
        p.insert("att.word", Tensor::uniform(&[h, 2 * h], s1, &mut rng));
        p.insert("out.comb.w", Tensor::uniform(&[3 * h, h], 1.0 / ((3 * h) as f64).sqrt(), &mut rng));
        p.insert("out.comb.b", Tensor::zeros(&[h]));
        p.insert("out.w", Tensor::uniform(&[h, v], s1, &mut rng));
        p.insert("out.b", Tensor::zeros(&[v]));
        Ok(McsModel {
            config,
            vocab,
            params: p,
        })
    }

    pub fn with_params(&self, params: ParamStore) -> Self {
        McsModel {
            config: self.config.clone(),
            vocab: self.vocab.clone(),
            params,
        }
    }

    fn handles(&self, b: &Bound) -> Result<Handles> {
        let c = &self.config;
        let pair = |kind: &str, l: usize| -> Result<(GruParams, GruParams)> {
            Ok((
                GruParams::bind(b, &format!("{kind}.{l}.fwd"))?,
                GruParams::bind(b, &format!("{kind}.{l}.bwd"))?,
            ))
        };
        Ok(Handles {
            embed: b.get("embed")?,
            word: (0..c.word_layers).map(|l| pair("word", l)).collect::<Result<_>>()?,
            sent: (0..c.sent_layers).map(|l| pair("sent", l)).collect::<Result<_>>()?,
            dec: (0..c.dec_layers)
                .map(|l| GruParams::bind(b, &format!("dec.{l}")))
                .collect::<Result<_>>()?,
            cls_w: b.get("cls.w")?,
            cls_b: b.get("cls.b")?,
            init_w: b.get("dec.init.w")?,
            init_b: b.get("dec.init.b")?,
            att_sent: b.get("att.sent")?,
            att_word: b.get("att.word")?,
            comb_w: b.get("out.comb.w")?,
            comb_b: b.get("out.comb.b")?,
            out_w: b.get("out.w")?,
            out_b: b.get("out.b")?,
        })
    }

    /// Maps a document to clipped word ids, warning when limits cut it.
    pub fn prepare(&self, doc: &Document) -> Result<EncodedDoc> {
        let n1 = self.config.max_sentences;
        let n2 = self.config.max_words;
        if doc.num_sentences() > n1 {
            log::warn!(
                "`{}`: clipping {} sentences to {n1}",
                doc.id,
                doc.num_sentences()
            );
        }
        let mut cut_words = false;
        let sentences: Vec<Vec<usize>> = doc
            .sentences
            .iter()
            .take(n1)
            .map(|s| {
                let mut ids = self.vocab.encode(s);
                if ids.len() > n2 {
                    cut_words = true;
                    ids.truncate(n2);
                }
                ids
            })
            .collect();
        if cut_words {
            log::warn!("`{}`: clipping sentences to {n2} words", doc.id);
        }
        if sentences.iter().all(Vec::is_empty) {
            return Err(Error::Input(format!("document `{}` is empty", doc.id)));
        }
        Ok(EncodedDoc {
            sentences,
            original_sentences: doc.num_sentences(),
        })
    }

    /// Encodes the reference as target ids: clipped, then terminated by the end token.
    pub fn target_ids(&self, reference: &TokenSeq) -> Vec<usize> {
        let mut ids = self.vocab.encode(reference);
        ids.truncate(self.config.max_target - 1);
        ids.push(EOS);
        ids
    }

    pub fn example(&self, doc: &Document, reference: &TokenSeq) -> Result<McsExample> {
        let enc = self.prepare(doc)?;
        let mut labels = make_labels(doc, reference)?;
        labels.truncate(enc.num_sentences());
        Ok(McsExample {
            id: doc.id.clone(),
            doc: enc,
            target: self.target_ids(reference),
            labels,
        })
    }

    /// Runs both encoder levels.
    pub fn encode(
        &self,
        tape: &mut Tape,
        b: &Bound,
        doc: &EncodedDoc,
        mut rng: Option<&mut dyn RngCore>,
    ) -> Result<Encoded> {
        let hd = self.handles(b)?;
        let h = self.config.hidden;
        let p = self.config.dropout;
        let n1 = doc.num_sentences();
        if n1 == 0 || doc.sentences.iter().all(Vec::is_empty) {
            return Err(Error::Input("cannot encode an empty document".into()));
        }
        if let Some(&bad) = doc.sentences.iter().flatten().find(|&&t| t >= self.config.vocab) {
            return Err(Error::Input(format!("token id {bad} outside vocabulary")));
        }
        let lens: Vec<usize> = doc.sentences.iter().map(Vec::len).collect();
        let steps = lens.iter().copied().max().unwrap_or(0);

        let mut inputs: Vec<Var> = Vec::with_capacity(steps);
        let mut masks: Vec<Var> = Vec::with_capacity(steps);
        for t in 0..steps {
            let ids: Vec<usize> = doc
                .sentences
                .iter()
                .map(|s| s.get(t).copied().unwrap_or(0))
                .collect();
            let x = tape.gather_rows(hd.embed, &ids)?;
            inputs.push(dropout(tape, x, p, rng.as_deref_mut()));
            let mut m = vec![0.0; n1 * h];
            for (i, &len) in lens.iter().enumerate() {
                if t < len {
                    m[i * h..(i + 1) * h].fill(1.0);
                }
            }
            masks.push(tape.constant(Tensor::new(vec![n1, h], m)?));
        }

        let zero = tape.constant(Tensor::zeros(&[n1, h]));
        let mut last_fwd = zero;
        let mut first_bwd = zero;
        for (l, (fwd, bwd)) in hd.word.iter().enumerate() {
            let mut out_f = Vec::with_capacity(steps);
            let mut state = zero;
            for t in 0..steps {
                let next = gru_cell(tape, inputs[t], state, fwd)?;
                state = blend(tape, state, next, masks[t])?;
                out_f.push(state);
            }
            last_fwd = state;
            let mut out_b = vec![zero; steps];
            let mut state = zero;
            for t in (0..steps).rev() {
                let next = gru_cell(tape, inputs[t], state, bwd)?;
                state = blend(tape, state, next, masks[t])?;
                out_b[t] = state;
            }
            first_bwd = state;
            let mut next_inputs = Vec::with_capacity(steps);
            for t in 0..steps {
                let cat = tape.concat_cols(&[out_f[t], out_b[t]])?;
                next_inputs.push(if l + 1 < hd.word.len() {
                    dropout(tape, cat, p, rng.as_deref_mut())
                } else {
                    cat
                });
            }
            inputs = next_inputs;
        }

        // Rows of the stacked outputs are ordered (t, i); words are listed sentence-major.
        let stacked = tape.concat_rows(&inputs)?;
        let mut rows = Vec::new();
        let mut word_sentence = Vec::new();
        for (i, &len) in lens.iter().enumerate() {
            for t in 0..len {
                rows.push(t * n1 + i);
                word_sentence.push(i);
            }
        }
        let word_states = tape.gather_rows(stacked, &rows)?;
        let word_states_t = tape.transpose(word_states)?;

        let sent_in = tape.concat_cols(&[last_fwd, first_bwd])?;
        let sent_in = dropout(tape, sent_in, p, rng);
        let mut seq: Vec<Var> = (0..n1)
            .map(|i| tape.gather_rows(sent_in, &[i]))
            .collect::<Result<_>>()?;
        let zero1 = tape.constant(Tensor::zeros(&[1, h]));
        for (fwd, bwd) in &hd.sent {
            let mut out_f = Vec::with_capacity(n1);
            let mut state = zero1;
            for x in &seq {
                state = gru_cell(tape, *x, state, fwd)?;
                out_f.push(state);
            }
            let mut out_b = vec![zero1; n1];
            let mut state = zero1;
            for i in (0..n1).rev() {
                state = gru_cell(tape, seq[i], state, bwd)?;
                out_b[i] = state;
            }
            seq = (0..n1)
                .map(|i| tape.concat_cols(&[out_f[i], out_b[i]]))
                .collect::<Result<_>>()?;
        }
        let sentence_states = tape.concat_rows(&seq)?;
        let sentence_states_t = tape.transpose(sentence_states)?;
        Ok(Encoded {
            word_states,
            word_states_t,
            word_sentence,
            sentence_states,
            sentence_states_t,
        })
    }

    /// Label probabilities `ẑ = σ(H_s w + b)` as a `[N1 × 1]` node.
    pub fn label_probs(&self, tape: &mut Tape, b: &Bound, enc: &Encoded) -> Result<Var> {
        let hd = self.handles(b)?;
        let a = tape.matmul(enc.sentence_states, hd.cls_w)?;
        let a = tape.add_row(a, hd.cls_b)?;
        Ok(tape.sigmoid(a))
    }

    /// Initial decoder state for every layer, `[1 × h]`.
    pub fn decoder_init(&self, tape: &mut Tape, b: &Bound, enc: &Encoded) -> Result<Vec<Var>> {
        let hd = self.handles(b)?;
        let n1 = tape.shape(enc.sentence_states)[0];
        let avg = tape.constant(Tensor::full(&[1, n1], 1.0 / n1 as f64));
        let mean = tape.matmul(avg, enc.sentence_states)?;
        let s = tape.matmul(mean, hd.init_w)?;
        let s = tape.add_row(s, hd.init_b)?;
        let s = tape.tanh(s);
        Ok(vec![s; self.config.dec_layers])
    }

    /// Advances the decoder GRU stack one step for each row of `prev` tokens.
    pub fn decoder_step(
        &self,
        tape: &mut Tape,
        b: &Bound,
        prev: &[usize],
        states: &[Var],
    ) -> Result<Vec<Var>> {
        let hd = self.handles(b)?;
        let mut x = tape.gather_rows(hd.embed, prev)?;
        let mut out = Vec::with_capacity(states.len());
        for (cell, &s) in hd.dec.iter().zip(states) {
            let n = gru_cell(tape, x, s, cell)?;
            out.push(n);
            x = n;
        }
        Ok(out)
    }

    /// Attends from top-layer decoder states `[k × h]` and projects to vocabulary logits.
    ///
    /// Returns the logits `[k × V]` and sentence-level log attention `[k × N1]`.
    /// Word attention is the product of sentence and word attention, renormalized:
    /// softmax over `word logits + ln α^s` of each word's sentence.
    pub fn attend(&self, tape: &mut Tape, b: &Bound, enc: &Encoded, top: Var) -> Result<(Var, Var)> {
        let hd = self.handles(b)?;
        let qs = tape.matmul(top, hd.att_sent)?;
        let sent_logits = tape.matmul(qs, enc.sentence_states_t)?;
        let sent_logp = tape.log_softmax(sent_logits);
        let qw = tape.matmul(top, hd.att_word)?;
        let word_logits = tape.matmul(qw, enc.word_states_t)?;
        let prior = tape.gather_cols(sent_logp, &enc.word_sentence)?;
        let word_logits = tape.add(word_logits, prior)?;
        let alpha_w = tape.softmax(word_logits)?;
        let ctx = tape.matmul(alpha_w, enc.word_states)?;
        let cat = tape.concat_cols(&[top, ctx])?;
        let comb = tape.matmul(cat, hd.comb_w)?;
        let comb = tape.add_row(comb, hd.comb_b)?;
        let comb = tape.tanh(comb);
        let logits = tape.matmul(comb, hd.out_w)?;
        let logits = tape.add_row(logits, hd.out_b)?;
        Ok((logits, sent_logp))
    }

    /// Teacher-forced logits `[M × V]` and sentence log attention `[M × N1]`.
    pub fn teacher_forced(
        &self,
        tape: &mut Tape,
        b: &Bound,
        enc: &Encoded,
        target: &[usize],
    ) -> Result<(Var, Var)> {
        if target.is_empty() || target.len() > self.config.max_target {
            return Err(Error::Length {
                len: target.len(),
                max: self.config.max_target,
            });
        }
        if let Some(&bad) = target.iter().find(|&&t| t >= self.config.vocab) {
            return Err(Error::Input(format!("target token {bad} outside vocabulary")));
        }
        let mut states = self.decoder_init(tape, b, enc)?;
        let mut tops = Vec::with_capacity(target.len());
        let mut prev = BOS;
        for &y in target {
            states = self.decoder_step(tape, b, &[prev], &states)?;
            tops.push(*states.last().expect("at least one decoder layer"));
            prev = y;
        }
        let top = tape.concat_rows(&tops)?;
        self.attend(tape, b, enc, top)
    }

    /// `−Σ_m log P(y_m | y_<m, X)` under teacher forcing.
    pub fn seq2seq_loss(&self, tape: &mut Tape, b: &Bound, enc: &Encoded, target: &[usize]) -> Result<Var> {
        let (logits, _) = self.teacher_forced(tape, b, enc, target)?;
        let logp = tape.log_softmax(logits);
        let picked = tape.pick(logp, target)?;
        let total = tape.sum(picked);
        Ok(tape.scale(total, -1.0))
    }

    /// Binary cross-entropy of `ẑ` against `labels`, with `ẑ` clamped to `[1e-12, 1 − 1e-12]`.
    pub fn label_loss(&self, tape: &mut Tape, b: &Bound, enc: &Encoded, labels: &[bool]) -> Result<Var> {
        let z_hat = self.label_probs(tape, b, enc)?;
        let n1 = tape.shape(z_hat)[0];
        if labels.len() != n1 {
            return Err(Error::Input(format!("{} labels for {n1} sentences", labels.len())));
        }
        if tape
            .value(z_hat)
            .data()
            .iter()
            .any(|&v| !(LABEL_CLAMP..=1.0 - LABEL_CLAMP).contains(&v))
        {
            log::debug!("label probabilities clamped to [{LABEL_CLAMP}, 1 - {LABEL_CLAMP}]");
        }
        let z: Vec<f64> = labels.iter().map(|&l| if l { 1.0 } else { 0.0 }).collect();
        let not_z: Vec<f64> = z.iter().map(|v| 1.0 - v).collect();
        let z = tape.constant(Tensor::new(vec![n1, 1], z)?);
        let not_z = tape.constant(Tensor::new(vec![n1, 1], not_z)?);
        let p = tape.clamp(z_hat, LABEL_CLAMP, 1.0 - LABEL_CLAMP);
        let q = tape.affine(z_hat, -1.0, 1.0);
        let q = tape.clamp(q, LABEL_CLAMP, 1.0 - LABEL_CLAMP);
        let lp = tape.ln(p);
        let lq = tape.ln(q);
        let a = tape.mul(z, lp)?;
        let c = tape.mul(not_z, lq)?;
        let s = tape.add(a, c)?;
        let s = tape.sum(s);
        Ok(tape.scale(s, -1.0))
    }

    /// `γ L_label + (1 − γ) L_seq2seq`. A branch with zero weight is not built.
    pub fn mcs_loss(
        &self,
        tape: &mut Tape,
        b: &Bound,
        enc: &Encoded,
        target: &[usize],
        labels: &[bool],
        gamma: f64,
    ) -> Result<Var> {
        check_gamma(gamma)?;
        if gamma == 1.0 {
            return self.label_loss(tape, b, enc, labels);
        }
        let s2s = self.seq2seq_loss(tape, b, enc, target)?;
        if gamma == 0.0 {
            return Ok(s2s);
        }
        let lab = self.label_loss(tape, b, enc, labels)?;
        let lab = tape.scale(lab, gamma);
        let s2s = tape.scale(s2s, 1.0 - gamma);
        tape.add(lab, s2s)
    }

    /// Evaluates the combined loss of one example without gradients.
    pub fn example_loss(&self, ex: &McsExample, gamma: f64) -> Result<f64> {
        let mut tape = Tape::new();
        let b = self.params.bind_frozen(&mut tape);
        let enc = self.encode(&mut tape, &b, &ex.doc, None)?;
        let l = self.mcs_loss(&mut tape, &b, &enc, &ex.target, &ex.labels, gamma)?;
        Ok(tape.value(l).item())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let meta = serde_json::to_string(&Meta {
            model: "mcs".into(),
            config: self.config.clone(),
            vocab: self.vocab.clone(),
        })?;
        let w = BufWriter::new(File::create(path)?);
        self.params.write_container(w, &meta)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let r = BufReader::new(File::open(path)?);
        let (params, meta) = ParamStore::read_container(r)?;
        let meta: Meta = serde_json::from_str(&meta)
            .map_err(|e| Error::Format(format!("checkpoint metadata: {e}")))?;
        if meta.model != "mcs" {
            return Err(Error::Format(format!(
                "checkpoint holds a `{}` model, expected `mcs`",
                meta.model
            )));
        }
        let model = McsModel {
            config: meta.config,
            vocab: meta.vocab,
            params,
        };
        let reference = McsModel::new(model.config.clone(), model.vocab.clone(), 0)?;
        for (name, t) in reference.params.iter() {
            match model.params.get(name) {
                Some(p) if p.shape() == t.shape() => {}
                Some(p) => {
                    return Err(Error::Format(format!(
                        "parameter `{name}` has shape {:?}, expected {:?}",
                        p.shape(),
                        t.shape()
                    )))
                }
                None => return Err(Error::Format(format!("checkpoint lacks `{name}`"))),
            }
        }
        Ok(model)
    }
}

/// `h + m ⊙ (h_new − h)`: advance rows whose mask is 1, hold the rest.
fn blend(tape: &mut Tape, h: Var, h_new: Var, mask: Var) -> Result<Var> {
    let d = tape.sub(h_new, h)?;
    let d = tape.mul(mask, d)?;
    tape.add(h, d)
}

/// Inverted dropout; the identity when `rng` is absent or `p` is zero.
fn dropout<'r>(tape: &mut Tape, x: Var, p: f64, rng: Option<&mut (dyn RngCore + 'r)>) -> Var {
    let Some(rng) = rng else { return x };
    if p == 0.0 {
        return x;
    }
    let shape = tape.shape(x).to_vec();
    let n: usize = shape.iter().product();
    let keep = 1.0 / (1.0 - p);
    let m: Vec<f64> = (0..n)
        .map(|_| if rng.gen::<f64>() < p { 0.0 } else { keep })
        .collect();
    let m = tape.constant(Tensor::new(shape, m).expect("shape"));
    tape.mul(x, m).expect("same shape")
}
