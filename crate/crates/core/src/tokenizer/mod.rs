//! SMILES-aware pre-tokenization, BPE training and token streams.

mod bpe;
mod error;
mod pretokenize;
mod vocab;

pub use bpe::{decode_ids, decode_tokens, encode_tokens, train_bpe, train_bpe_with, BpeConfig, TokenStream};
pub use error::TokenizerError;
pub use pretokenize::{pretokenize, pretokenize_lenient, ring_label};
pub use vocab::{Vocabulary, BOS, EOS, MASK, PAD, SPECIAL_TOKENS, UNK};
