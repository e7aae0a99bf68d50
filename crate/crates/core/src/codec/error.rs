use thiserror::Error;

use crate::chem::ChemError;
use crate::fragment::FragmentError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CodecError {
    #[error("attachment label {label} is never closed")]
    OpenAttachment { label: u16 },
    #[error("cut bond {bond} is not a single bond")]
    UnsupportedCutOrder { bond: usize },
    #[error("{needed} attachment labels would exceed the ring-closure limit of 99")]
    TooManyLabels { needed: usize },
    #[error("block {index}: {source}")]
    Block { index: usize, source: ChemError },
    #[error(transparent)]
    Chem(#[from] ChemError),
    #[error(transparent)]
    Fragment(#[from] FragmentError),
}
