use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mcs::model::{EncodedDoc, McsModel};
use crate::mcs::vocab::{BOS, EOS, PAD, UNK};
use crate::numerics::{Tape, Tensor, Var};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BeamConfig {
    pub width: usize,
    /// Finished hypotheses are ranked by `score / len^length_penalty`.
    pub length_penalty: f64,
    /// The end token is suppressed until this many tokens have been emitted.
    pub min_len: usize,
    /// Emitted-token limit, end token included.
    pub max_len: usize,
    /// No n-gram of this size may repeat; 0 disables the check.
    pub no_repeat_ngram: usize,
}

impl BeamConfig {
    /// The published inference settings.
    pub fn paper() -> Self {
        BeamConfig {
            width: 4,
            length_penalty: 2.0,
            min_len: 56,
            max_len: 144,
            no_repeat_ngram: 3,
        }
    }

    /// Paper settings scaled to toy target lengths.
    pub fn toy(max_len: usize) -> Self {
        BeamConfig {
            min_len: 0,
            max_len,
            ..Self::paper()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.width == 0 {
            return Err(Error::Domain("beam width must be at least 1".into()));
        }
        if self.max_len == 0 || self.min_len >= self.max_len {
            return Err(Error::Domain(format!(
                "need min_len < max_len, got {} and {}",
                self.min_len, self.max_len
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BeamOutput {
    /// Decoded ids without the end token.
    pub tokens: Vec<usize>,
    /// Sum of token log-probabilities, end token included.
    pub log_prob: f64,
    /// Length-normalized score the hypothesis won with.
    pub score: f64,
    /// Sentence attention `α^s` of every emitted step, end step included.
    pub attention: Vec<Vec<f64>>,
}

#[derive(Clone)]
struct Hyp {
    tokens: Vec<usize>,
    log_prob: f64,
    states: Vec<Var>,
    attention: Vec<Vec<f64>>,
}

/// Would appending `next` complete an n-gram already present in `tokens`?
pub(crate) fn repeats_ngram(tokens: &[usize], next: usize, n: usize) -> bool {
    if n == 0 || tokens.len() + 1 < n {
        return false;
    }
    let prefix = &tokens[tokens.len() + 1 - n..];
    tokens.windows(n).any(|w| w[..n - 1] == *prefix && w[n - 1] == next)
}

fn banned(tok: usize) -> bool {
    tok == PAD || tok == BOS || tok == UNK
}

/// Length-penalized beam search over the decoder.
pub fn beam_search(model: &McsModel, doc: &EncodedDoc, cfg: &BeamConfig) -> Result<BeamOutput> {
    cfg.validate()?;
    let mut tape = Tape::new();
    let b = model.params.bind_frozen(&mut tape);
    let enc = model.encode(&mut tape, &b, doc, None)?;
    let init = model.decoder_init(&mut tape, &b, &enc)?;
    let v = model.config.vocab;

    let mut live = vec![Hyp {
        tokens: Vec::new(),
        log_prob: 0.0,
        states: init,
        attention: Vec::new(),
    }];
    let mut finished: Vec<(f64, Hyp)> = Vec::new();
    for step in 0..cfg.max_len {
        let prev: Vec<usize> = live.iter().map(|h| *h.tokens.last().unwrap_or(&BOS)).collect();
        let layers = model.config.dec_layers;
        let stacked: Vec<Var> = (0..layers)
            .map(|l| {
                let rows: Vec<Var> = live.iter().map(|h| h.states[l]).collect();
                tape.concat_rows(&rows)
            })
            .collect::<Result<_>>()?;
        let states = model.decoder_step(&mut tape, &b, &prev, &stacked)?;
        let (logits, sent_logp) = model.attend(&mut tape, &b, &enc, *states.last().expect("layer"))?;
        let logp = tape.log_softmax(logits);
        let logp = tape.value(logp).clone();
        let alpha: Tensor = tape.value(sent_logp).map(f64::exp);

        let last_step = step + 1 == cfg.max_len;
        let mut cands: Vec<(f64, usize, usize)> = Vec::new();
        for (hi, h) in live.iter().enumerate() {
            for tok in 0..v {
                if banned(tok) {
                    continue;
                }
                if tok == EOS && step < cfg.min_len {
                    continue;
                }
                if last_step && tok != EOS {
                    continue;
                }
                if tok != EOS && repeats_ngram(&h.tokens, tok, cfg.no_repeat_ngram) {
                    continue;
                }
                cands.push((h.log_prob + logp.at(hi, tok), hi, tok));
            }
        }
        cands.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

        // Only end tokens ranked within the beam width finalize a hypothesis,
        // so width 1 reduces to greedy decoding.
        let mut next = Vec::with_capacity(cfg.width);
        for (rank, (lp, hi, tok)) in cands.into_iter().take(2 * cfg.width).enumerate() {
            if tok == EOS && rank >= cfg.width {
                continue;
            }
            if tok != EOS && next.len() >= cfg.width {
                continue;
            }
            let parent = &live[hi];
            let mut attention = parent.attention.clone();
            attention.push(alpha.row(hi).to_vec());
            let mut tokens = parent.tokens.clone();
            tokens.push(tok);
            let row_states: Vec<Var> = states
                .iter()
                .map(|&s| tape.gather_rows(s, &[hi]))
                .collect::<Result<_>>()?;
            let hyp = Hyp {
                tokens,
                log_prob: lp,
                states: row_states,
                attention,
            };
            if tok == EOS {
                let len = hyp.tokens.len() as f64;
                finished.push((lp / len.powf(cfg.length_penalty), hyp));
            } else {
                next.push(hyp);
            }
        }
        live = next;
        if live.is_empty() || finished.len() >= cfg.width {
            break;
        }
    }

    let (score, best) = finished
        .into_iter()
        .enumerate()
        .max_by(|(ia, a), (ib, b)| a.0.total_cmp(&b.0).then(ib.cmp(ia)))
        .map(|(_, f)| f)
        .ok_or_else(|| Error::Contract("beam search finished no hypothesis".into()))?;
    let mut tokens = best.tokens;
    tokens.pop();
    Ok(BeamOutput {
        tokens,
        log_prob: best.log_prob,
        score,
        attention: best.attention,
    })
}
