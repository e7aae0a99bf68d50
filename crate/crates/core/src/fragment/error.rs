use thiserror::Error;

use crate::chem::ChemError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FragmentError {
    #[error("bond {bond} lies in a ring and cannot be cut")]
    RingBondCut { bond: usize },
    #[error("bond index {bond} is out of range")]
    InvalidBondIndex { bond: usize },
    #[error("graph has {atoms} heavy atoms; at least 2 are needed")]
    TooSmall { atoms: usize },
    #[error("rule line {line}: {message}")]
    RuleSyntax { line: usize, message: String },
    #[error("reading rule file: {0}")]
    Io(String),
    #[error(transparent)]
    Chem(#[from] ChemError),
}
