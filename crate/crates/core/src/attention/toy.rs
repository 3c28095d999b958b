use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::attention::mask::Window;
use crate::attention::mha::{collect_map, multi_head_attention, AttentionMap, AttentionParams};
use crate::attention::positional::extend_positional_embedding;
use crate::error::{Error, Result};
use crate::numerics::{Mask, Tape, Tensor, Var};
use crate::params::{Bound, ParamStore};

pub const BOS: usize = 1;
const LN_EPS: f64 = 1e-5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ToyModelConfig {
    pub vocab: usize,
    pub d_model: usize,
    pub n_heads: usize,
    pub encoder_layers: usize,
    pub decoder_layers: usize,
    pub ffn_dim: usize,
    /// Rows of the base positional table before flip extension.
    pub base_positions: usize,
    pub max_source: usize,
    pub max_target: usize,
    pub window: Window,
}

impl Default for ToyModelConfig {
    fn default() -> Self {
        ToyModelConfig {
            vocab: 101,
            d_model: 16,
            n_heads: 4,
            encoder_layers: 2,
            decoder_layers: 2,
            ffn_dim: 32,
            base_positions: 16,
            max_source: 64,
            max_target: 16,
            window: Window::Full,
        }
    }
}

impl ToyModelConfig {
    pub fn validate(&self) -> Result<()> {
        let dims = [
            self.vocab,
            self.d_model,
            self.n_heads,
            self.encoder_layers,
            self.ffn_dim,
            self.base_positions,
            self.max_source,
            self.max_target,
        ];
        if dims.contains(&0) {
            return Err(Error::Domain("model dimensions must be positive".into()));
        }
        if !self.d_model.is_multiple_of(self.n_heads) {
            return Err(Error::Domain(format!(
                "d_model {} is not divisible by {} heads",
                self.d_model, self.n_heads
            )));
        }
        if !self.max_source.is_multiple_of(self.base_positions) {
            return Err(Error::Extension {
                base: self.base_positions,
                target: self.max_source,
            });
        }
        if let Window::Local(0) = self.window {
            return Err(Error::InvalidWindow);
        }
        Ok(())
    }
}

/// Encoder states plus the self-attention map of every layer.
pub struct EncoderOutput {
    pub states: Var,
    pub attention: Vec<AttentionMap>,
}

/// Small BART-shaped encoder–decoder with a windowed encoder.
#[derive(Clone, Debug)]
pub struct ToyTransformer {
    pub config: ToyModelConfig,
    pub params: ParamStore,
}

#[derive(Serialize, Deserialize)]
struct Meta {
    model: String,
    config: ToyModelConfig,
}

impl ToyTransformer {
    pub fn new(config: ToyModelConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = &config;
        let d = c.d_model;
        let mut p = ParamStore::new();
        p.insert("embed", Tensor::uniform(&[c.vocab, d], 0.5, &mut rng));
        p.insert("out.bias", Tensor::zeros(&[c.vocab]));
        let base = Tensor::uniform(&[c.base_positions, d], 0.5, &mut rng);
        p.insert("enc.pos", extend_positional_embedding(&base, c.max_source)?);
        p.insert("dec.pos", Tensor::uniform(&[c.max_target, d], 0.5, &mut rng));
        for side in ["enc", "dec"] {
            insert_ln(&mut p, &format!("{side}.ln_emb"), d);
        }
        for l in 0..c.encoder_layers {
            let pre = format!("enc.{l}");
            AttentionParams::init(&mut p, &format!("{pre}.self"), d, &mut rng);
            insert_ln(&mut p, &format!("{pre}.ln1"), d);
            insert_ffn(&mut p, &pre, d, c.ffn_dim, &mut rng);
            insert_ln(&mut p, &format!("{pre}.ln2"), d);
        }
        for l in 0..c.decoder_layers {
            let pre = format!("dec.{l}");
            AttentionParams::init(&mut p, &format!("{pre}.self"), d, &mut rng);
            insert_ln(&mut p, &format!("{pre}.ln1"), d);
            AttentionParams::init(&mut p, &format!("{pre}.cross"), d, &mut rng);
            insert_ln(&mut p, &format!("{pre}.ln2"), d);
            insert_ffn(&mut p, &pre, d, c.ffn_dim, &mut rng);
            insert_ln(&mut p, &format!("{pre}.ln3"), d);
        }
        Ok(ToyTransformer { config, params: p })
    }

    fn check_tokens(&self, tokens: &[usize], max: usize) -> Result<()> {
        if tokens.is_empty() {
            return Err(Error::Input("empty token sequence".into()));
        }
        if tokens.len() > max {
            return Err(Error::Length {
                len: tokens.len(),
                max,
            });
        }
        if let Some(&t) = tokens.iter().find(|&&t| t >= self.config.vocab) {
            return Err(Error::Input(format!(
                "token id {t} outside vocabulary of {}",
                self.config.vocab
            )));
        }
        Ok(())
    }

    fn embed(&self, tape: &mut Tape, b: &Bound, tokens: &[usize], side: &str) -> Result<Var> {
        let emb = tape.gather_rows(b.get("embed")?, tokens)?;
        let positions: Vec<usize> = (0..tokens.len()).collect();
        let pos = tape.gather_rows(b.get(&format!("{side}.pos"))?, &positions)?;
        let x = tape.add(emb, pos)?;
        layer_norm(tape, b, x, &format!("{side}.ln_emb"))
    }

    /// Runs the encoder with the configured window.
    pub fn encode(&self, tape: &mut Tape, b: &Bound, tokens: &[usize]) -> Result<EncoderOutput> {
        self.encode_with(tape, b, tokens, self.config.window)
    }

    pub fn encode_with(
        &self,
        tape: &mut Tape,
        b: &Bound,
        tokens: &[usize],
        window: Window,
    ) -> Result<EncoderOutput> {
        self.check_tokens(tokens, self.config.max_source)?;
        let mask = window.mask(tokens.len())?;
        let mut x = self.embed(tape, b, tokens, "enc")?;
        let mut attention = Vec::with_capacity(self.config.encoder_layers);
        for l in 0..self.config.encoder_layers {
            let pre = format!("enc.{l}");
            let ap = AttentionParams::bind(b, &format!("{pre}.self"))?;
            let (a, w) = multi_head_attention(tape, x, x, x, &mask, &ap, self.config.n_heads)?;
            attention.push(collect_map(tape, &w));
            let r = tape.add(x, a)?;
            x = layer_norm(tape, b, r, &format!("{pre}.ln1"))?;
            let f = ffn(tape, b, x, &pre)?;
            let r = tape.add(x, f)?;
            x = layer_norm(tape, b, r, &format!("{pre}.ln2"))?;
        }
        Ok(EncoderOutput {
            states: x,
            attention,
        })
    }

    /// Decoder logits `[len(decoder_input) × vocab]`; position `m` sees inputs `≤ m`.
    pub fn forward(
        &self,
        tape: &mut Tape,
        b: &Bound,
        source: &[usize],
        decoder_input: &[usize],
    ) -> Result<Var> {
        let enc = self.encode(tape, b, source)?;
        self.check_tokens(decoder_input, self.config.max_target)?;
        let m = decoder_input.len();
        let causal = Mask::causal(m);
        let cross = Mask::full(m, source.len());
        let mut y = self.embed(tape, b, decoder_input, "dec")?;
        for l in 0..self.config.decoder_layers {
            let pre = format!("dec.{l}");
            let sp = AttentionParams::bind(b, &format!("{pre}.self"))?;
            let (a, _) = multi_head_attention(tape, y, y, y, &causal, &sp, self.config.n_heads)?;
            let r = tape.add(y, a)?;
            y = layer_norm(tape, b, r, &format!("{pre}.ln1"))?;
            let cp = AttentionParams::bind(b, &format!("{pre}.cross"))?;
            let (c, _) = multi_head_attention(
                tape,
                y,
                enc.states,
                enc.states,
                &cross,
                &cp,
                self.config.n_heads,
            )?;
            let r = tape.add(y, c)?;
            y = layer_norm(tape, b, r, &format!("{pre}.ln2"))?;
            let f = ffn(tape, b, y, &pre)?;
            let r = tape.add(y, f)?;
            y = layer_norm(tape, b, r, &format!("{pre}.ln3"))?;
        }
        let et = tape.transpose(b.get("embed")?)?;
        let logits = tape.matmul(y, et)?;
        tape.add_row(logits, b.get("out.bias")?)
    }

    /// Teacher-forced token cross-entropy summed over `target`.
    pub fn loss(&self, tape: &mut Tape, b: &Bound, source: &[usize], target: &[usize]) -> Result<Var> {
        let mut input = Vec::with_capacity(target.len());
        input.push(BOS);
        input.extend_from_slice(&target[..target.len().saturating_sub(1)]);
        let logits = self.forward(tape, b, source, &input)?;
        let logp = tape.log_softmax(logits);
        let picked = tape.pick(logp, target)?;
        let total = tape.sum(picked);
        Ok(tape.scale(total, -1.0))
    }

    /// Encoder states as plain values.
    pub fn encoder_states(&self, tokens: &[usize]) -> Result<(Tensor, Vec<AttentionMap>)> {
        let mut tape = Tape::new();
        let b = self.params.bind_frozen(&mut tape);
        let out = self.encode(&mut tape, &b, tokens)?;
        Ok((tape.value(out.states).clone(), out.attention))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let meta = serde_json::to_string(&Meta {
            model: "toy_transformer".into(),
            config: self.config.clone(),
        })?;
        self.params
            .write_container(BufWriter::new(File::create(path)?), &meta)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let (params, meta) = ParamStore::read_container(BufReader::new(File::open(path)?))?;
        let meta: Meta = serde_json::from_str(&meta)?;
        if meta.model != "toy_transformer" {
            return Err(Error::Format(format!(
                "checkpoint holds a `{}` model, expected `toy_transformer`",
                meta.model
            )));
        }
        meta.config.validate()?;
        Ok(ToyTransformer {
            config: meta.config,
            params,
        })
    }
}

fn insert_ln(p: &mut ParamStore, prefix: &str, d: usize) {
    p.insert(format!("{prefix}.g"), Tensor::ones(&[d]));
    p.insert(format!("{prefix}.b"), Tensor::zeros(&[d]));
}

fn insert_ffn(p: &mut ParamStore, prefix: &str, d: usize, f: usize, rng: &mut ChaCha8Rng) {
    p.insert(format!("{prefix}.ffn.w1"), Tensor::uniform(&[d, f], 1.0 / (d as f64).sqrt(), rng));
    p.insert(format!("{prefix}.ffn.b1"), Tensor::uniform(&[f], 0.1, rng));
    p.insert(format!("{prefix}.ffn.w2"), Tensor::uniform(&[f, d], 1.0 / (f as f64).sqrt(), rng));
    p.insert(format!("{prefix}.ffn.b2"), Tensor::uniform(&[d], 0.1, rng));
}

fn layer_norm(tape: &mut Tape, b: &Bound, x: Var, prefix: &str) -> Result<Var> {
    let g = b.get(&format!("{prefix}.g"))?;
    let bias = b.get(&format!("{prefix}.b"))?;
    tape.layer_norm(x, g, bias, LN_EPS)
}

fn ffn(tape: &mut Tape, b: &Bound, x: Var, prefix: &str) -> Result<Var> {
    let h = tape.matmul(x, b.get(&format!("{prefix}.ffn.w1"))?)?;
    let h = tape.add_row(h, b.get(&format!("{prefix}.ffn.b1"))?)?;
    let h = tape.gelu(h);
    let o = tape.matmul(h, b.get(&format!("{prefix}.ffn.w2"))?)?;
    tape.add_row(o, b.get(&format!("{prefix}.ffn.b2"))?)
}
