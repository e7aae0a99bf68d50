//! Byte-pair merges over pre-tokens.

use std::collections::{BTreeSet, HashMap};

use super::error::TokenizerError;
use super::pretokenize::pretokenize_lenient;
use super::vocab::{Vocabulary, BOS, EOS, UNK};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BpeConfig {
    pub target_vocab: usize,
    /// Pairs seen fewer times than this are never merged.
    pub min_frequency: usize,
}

impl BpeConfig {
    pub fn new(target_vocab: usize) -> BpeConfig {
        BpeConfig {
            target_vocab,
            min_frequency: 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TokenStream {
    pub tokens: Vec<u32>,
    /// Byte range of each token in the source text; framing tokens get an
    /// empty range at the start or end.
    pub text_offsets: Vec<(usize, usize)>,
}

/// Trains merges with the default minimum pair frequency of 2.
pub fn train_bpe<S: AsRef<str>>(corpus: &[Vec<S>], target_vocab: usize) -> Result<Vocabulary, TokenizerError> {
    train_bpe_with(corpus, BpeConfig::new(target_vocab))
}

/// Starts from the specials plus the sorted set of pre-tokens and merges
/// the most frequent adjacent pair (ties: lexicographically smallest pair)
/// until the vocabulary reaches the target or no pair is frequent enough.
pub fn train_bpe_with<S: AsRef<str>>(corpus: &[Vec<S>], config: BpeConfig) -> Result<Vocabulary, TokenizerError> {
    if corpus.iter().all(|s| s.is_empty()) {
        return Err(TokenizerError::EmptyCorpus);
    }
    let alphabet: BTreeSet<&str> = corpus.iter().flatten().map(AsRef::as_ref).collect();
    let mut vocab = Vocabulary::with_alphabet(alphabet.iter().map(|s| s.to_string()))?;
    if config.target_vocab < vocab.len() {
        return Err(TokenizerError::TargetTooSmall {
            target: config.target_vocab,
            minimum: vocab.len(),
        });
    }

    let mut word_counts: HashMap<Vec<u32>, usize> = HashMap::new();
    for stream in corpus {
        let ids = stream.iter().map(|t| vocab.id(t.as_ref()).expect("alphabet covers corpus")).collect();
        *word_counts.entry(ids).or_insert(0) += 1;
    }
    let mut words: Vec<(Vec<u32>, usize)> = word_counts.into_iter().collect();
    words.sort_unstable();

    while vocab.len() < config.target_vocab {
        let mut pairs: HashMap<(u32, u32), usize> = HashMap::new();
        for (w, count) in &words {
            for p in w.windows(2) {
                *pairs.entry((p[0], p[1])).or_insert(0) += count;
            }
        }
        let surface = |id: u32| vocab.surface(id).expect("known id");
        let Some((&(left, right), &count)) = pairs.iter().max_by(|(pa, ca), (pb, cb)| {
            ca.cmp(cb)
                .then_with(|| (surface(pb.0), surface(pb.1)).cmp(&(surface(pa.0), surface(pa.1))))
        }) else {
            break;
        };
        if count < config.min_frequency.max(1) {
            break;
        }
        let (ls, rs) = (surface(left).to_string(), surface(right).to_string());
        let merged = vocab.insert(format!("{ls}{rs}"));
        vocab.push_merge(ls, rs);
        for (w, _) in &mut words {
            *w = merge_pair(w, (left, right), merged);
        }
    }
    Ok(vocab)
}

fn merge_pair(word: &[u32], pair: (u32, u32), merged: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(word.len());
    let mut i = 0;
    while i < word.len() {
        if i + 1 < word.len() && (word[i], word[i + 1]) == pair {
            out.push(merged);
            i += 2;
        } else {
            out.push(word[i]);
            i += 1;
        }
    }
    out
}

/// Pre-tokenizes `text`, applies merges in rank order and maps surfaces to
/// ids (unknown surfaces become UNK). With `framed`, BOS and EOS surround
/// the stream.
pub fn encode_tokens(text: &str, vocab: &Vocabulary, framed: bool) -> TokenStream {
    let mut symbols: Vec<(usize, usize)> = Vec::new();
    let mut pos = 0;
    for piece in pretokenize_lenient(text) {
        symbols.push((pos, pos + piece.len()));
        pos += piece.len();
    }
    loop {
        let best = symbols
            .windows(2)
            .filter_map(|w| vocab.merge_rank(&text[w[0].0..w[0].1], &text[w[1].0..w[1].1]))
            .min();
        let Some(rank) = best else { break };
        let (l, r) = &vocab.merges()[rank];
        let mut merged = Vec::with_capacity(symbols.len());
        let mut i = 0;
        while i < symbols.len() {
            if i + 1 < symbols.len()
                && &text[symbols[i].0..symbols[i].1] == l
                && &text[symbols[i + 1].0..symbols[i + 1].1] == r
            {
                merged.push((symbols[i].0, symbols[i + 1].1));
                i += 2;
            } else {
                merged.push(symbols[i]);
                i += 1;
            }
        }
        symbols = merged;
    }

    let mut tokens = Vec::with_capacity(symbols.len() + 2);
    let mut text_offsets = Vec::with_capacity(symbols.len() + 2);
    if framed {
        tokens.push(BOS);
        text_offsets.push((0, 0));
    }
    for (s, e) in symbols {
        tokens.push(vocab.id(&text[s..e]).unwrap_or(UNK));
        text_offsets.push((s, e));
    }
    if framed {
        tokens.push(EOS);
        text_offsets.push((text.len(), text.len()));
    }
    TokenStream { tokens, text_offsets }
}

/// Concatenates the surfaces of non-special ids.
pub fn decode_ids(ids: &[u32], vocab: &Vocabulary) -> String {
    ids.iter()
        .filter(|&&id| !Vocabulary::is_special(id))
        .filter_map(|&id| vocab.surface(id))
        .collect()
}

pub fn decode_tokens(stream: &TokenStream, vocab: &Vocabulary) -> String {
    decode_ids(&stream.tokens, vocab)
}
