//! Back-off n-gram model over token ids with constrained sampling.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::tokenizer::{decode_ids, encode_tokens, pretokenize_lenient, ring_label, Vocabulary, BOS, EOS, MASK, PAD, UNK};

use super::error::GenlabError;
use super::prompt::{verify_completion, TaskPrompt, Verdict};

/// Additive smoothing applied to every vocabulary entry.
pub const SMOOTHING: f64 = 0.01;

type Table = BTreeMap<Vec<u32>, BTreeMap<u32, u64>>;

/// Counts for every context length `0..order`; prediction uses the longest
/// context seen in training.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "ModelFile", try_from = "ModelFile")]
pub struct NGramModel {
    order: usize,
    vocab: Vocabulary,
    tables: Vec<Table>,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    order: usize,
    vocab: Vocabulary,
    tables: Vec<Vec<(Vec<u32>, Vec<(u32, u64)>)>>,
}

impl From<NGramModel> for ModelFile {
    fn from(m: NGramModel) -> Self {
        ModelFile {
            order: m.order,
            vocab: m.vocab,
            tables: m
                .tables
                .into_iter()
                .map(|t| t.into_iter().map(|(k, v)| (k, v.into_iter().collect())).collect())
                .collect(),
        }
    }
}

impl TryFrom<ModelFile> for NGramModel {
    type Error = GenlabError;
    fn try_from(f: ModelFile) -> Result<Self, GenlabError> {
        if !(1..=5).contains(&f.order) || f.tables.len() != f.order {
            return Err(GenlabError::InvalidOrder(f.order));
        }
        Ok(NGramModel {
            order: f.order,
            vocab: f.vocab,
            tables: f
                .tables
                .into_iter()
                .map(|t| t.into_iter().map(|(k, v)| (k, v.into_iter().collect())).collect())
                .collect(),
        })
    }
}

/// Counts n-grams over token streams (without framing), padding each with
/// `order - 1` BOS tokens and ending it with EOS.
pub fn train_ngram(corpus: &[Vec<u32>], vocab: &Vocabulary, order: usize) -> Result<NGramModel, GenlabError> {
    if !(1..=5).contains(&order) {
        return Err(GenlabError::InvalidOrder(order));
    }
    if corpus.is_empty() {
        return Err(GenlabError::EmptyCorpus);
    }
    let mut tables: Vec<Table> = vec![Table::new(); order];
    for stream in corpus {
        let mut seq = vec![BOS; order - 1];
        seq.extend_from_slice(stream);
        seq.push(EOS);
        for i in order - 1..seq.len() {
            for (len, table) in tables.iter_mut().enumerate() {
                let ctx = seq[i - len..i].to_vec();
                *table.entry(ctx).or_default().entry(seq[i]).or_insert(0) += 1;
            }
        }
    }
    Ok(NGramModel {
        order,
        vocab: vocab.clone(),
        tables,
    })
}

impl NGramModel {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    /// Smoothed next-token distribution after `history` (most recent last).
    pub fn distribution(&self, history: &[u32]) -> Vec<f64> {
        let v = self.vocab.len();
        for len in (0..self.order).rev() {
            let ctx = &history[history.len().saturating_sub(len)..];
            if ctx.len() < len {
                continue;
            }
            if let Some(counts) = self.tables[len].get(ctx) {
                let total: u64 = counts.values().sum();
                let denom = total as f64 + SMOOTHING * v as f64;
                let mut probs = vec![SMOOTHING / denom; v];
                for (&t, &c) in counts {
                    if (t as usize) < v {
                        probs[t as usize] = (c as f64 + SMOOTHING) / denom;
                    }
                }
                return probs;
            }
        }
        vec![1.0 / v as f64; v]
    }
}

/// A sampled text with its verdict against the prompt.
#[derive(Clone, Debug, PartialEq)]
pub struct Completion {
    pub text: String,
    /// Newly generated token ids (no framing).
    pub tokens: Vec<u32>,
    /// Generation stopped at `max_len` rather than at EOS.
    pub truncated: bool,
    pub verdict: Verdict,
}

/// Toggles ring labels that appear in a token's surface.
fn track_labels(open: &mut BTreeSet<u16>, surface: &str) {
    for piece in pretokenize_lenient(surface) {
        if let Some(label) = ring_label(piece) {
            if !open.remove(&label) {
                open.insert(label);
            }
        }
    }
}

fn pick(probs: &[f64], temperature: f64, rng: &mut ChaCha8Rng) -> Option<u32> {
    if temperature <= 0.0 {
        let mut best: Option<(usize, f64)> = None;
        for (i, &p) in probs.iter().enumerate() {
            if p > 0.0 && best.is_none_or(|(_, bp)| p > bp) {
                best = Some((i, p));
            }
        }
        return best.map(|(i, _)| i as u32);
    }
    let weights: Vec<f64> = probs
        .iter()
        .map(|&p| if p > 0.0 { p.powf(1.0 / temperature) } else { 0.0 })
        .collect();
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) {
        return None;
    }
    let mut x = rng.gen::<f64>() * total;
    let mut last = None;
    for (i, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            last = Some(i as u32);
            if x < w {
                return last;
            }
            x -= w;
        }
    }
    last
}

fn sample_one(
    model: &NGramModel,
    prompt: &TaskPrompt,
    prefix_ids: &[u32],
    max_len: usize,
    temperature: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Completion, GenlabError> {
    let mut history = vec![BOS; model.order - 1];
    history.extend_from_slice(prefix_ids);
    let mut open: BTreeSet<u16> = prompt.open_labels.iter().copied().collect();
    let mut tokens = Vec::new();
    let mut finished = false;
    while tokens.len() < max_len {
        let mut probs = model.distribution(&history);
        for special in [BOS, UNK, MASK, PAD] {
            probs[special as usize] = 0.0;
        }
        // EOS stays unavailable while any ring label is unclosed
        if !open.is_empty() {
            probs[EOS as usize] = 0.0;
        }
        let Some(next) = pick(&probs, temperature, rng) else { break };
        if next == EOS {
            finished = true;
            break;
        }
        track_labels(&mut open, model.vocab.surface(next).unwrap_or_default());
        tokens.push(next);
        history.push(next);
    }
    let text = format!("{}{}", prompt.prefix, decode_ids(&tokens, &model.vocab));
    let verdict = verify_completion(prompt, &text)?;
    Ok(Completion {
        text,
        tokens,
        truncated: !finished,
        verdict,
    })
}

/// Samples `n_samples` continuations of the prompt prefix, at most
/// `max_len` new tokens each. Temperature 0 is greedy (lowest id wins
/// ties). Every output carries its verdict; nothing is filtered.
pub fn complete_prefix(
    model: &NGramModel,
    prompt: &TaskPrompt,
    n_samples: usize,
    seed: u64,
    max_len: usize,
    temperature: f64,
) -> Result<Vec<Completion>, GenlabError> {
    let prefix_ids = if prompt.prefix.is_empty() {
        Vec::new()
    } else {
        encode_tokens(&prompt.prefix, &model.vocab, false).tokens
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n_samples)
        .map(|_| sample_one(model, prompt, &prefix_ids, max_len, temperature, &mut rng))
        .collect()
}

/// Unconstrained sampling from an empty prefix.
pub fn sample_denovo(
    model: &NGramModel,
    n: usize,
    seed: u64,
    max_len: usize,
    temperature: f64,
) -> Result<Vec<Completion>, GenlabError> {
    complete_prefix(model, &TaskPrompt::de_novo(), n, seed, max_len, temperature)
}
