use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TokenizerError {
    #[error("empty input")]
    EmptyInput,
    #[error("unrecognized character '{ch}' at position {pos}")]
    UnrecognizedCharacter { ch: char, pos: usize },
    #[error("target vocabulary {target} is smaller than the {minimum} base tokens")]
    TargetTooSmall { target: usize, minimum: usize },
    #[error("training corpus is empty")]
    EmptyCorpus,
    #[error("invalid vocabulary: {0}")]
    InvalidVocabulary(String),
}
