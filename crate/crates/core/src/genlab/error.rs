use thiserror::Error;

use crate::chem::ChemError;
use crate::codec::CodecError;
use crate::tokenizer::TokenizerError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenlabError {
    #[error("input has no '*' attachment site")]
    NoWildcard,
    #[error("found {found} '*' sites where at most {allowed} are allowed")]
    TooManyWildcards { found: usize, allowed: usize },
    #[error("expected {expected} input fragments, found {found}")]
    WrongFragmentCount { found: usize, expected: usize },
    #[error("requested {requested} attachment sites but only {available} atoms can take one")]
    NoEligibleSite { requested: usize, available: usize },
    #[error("text does not start with the prompt prefix")]
    PrefixMismatch,
    #[error("training corpus is empty")]
    EmptyCorpus,
    #[error("n-gram order {0} is outside 1..=5")]
    InvalidOrder(usize),
    #[error("reward alpha must be positive, got {0}")]
    InvalidAlpha(f64),
    #[error("unknown task '{0}'")]
    UnknownTask(String),
    #[error(transparent)]
    Chem(#[from] ChemError),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Tokenizer(#[from] TokenizerError),
}
