use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChemError {
    #[error("empty input")]
    EmptyInput,
    #[error("unbalanced parenthesis at position {pos}")]
    UnbalancedParenthesis { pos: usize },
    #[error("ring closure {label} opened at position {pos} is never closed")]
    UnmatchedRingDigit { label: u16, pos: usize },
    #[error("ring closure {label} at position {pos} duplicates an existing bond")]
    DuplicateRingBond { label: u16, pos: usize },
    #[error("unknown element '{symbol}' at position {pos}")]
    UnknownElement { symbol: String, pos: usize },
    #[error("unexpected character '{ch}' at position {pos}")]
    UnexpectedCharacter { ch: char, pos: usize },
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("malformed bracket atom at position {pos}")]
    InvalidBracketAtom { pos: usize },
    #[error("conflicting bond symbols on ring closure {label}")]
    ConflictingRingBond { label: u16 },
    #[error("valence {valence} not allowed for {element} (atom {atom})")]
    ValenceViolation { atom: usize, element: String, valence: u32 },
    #[error("aromatic atom {atom} is not in a ring")]
    AromaticOutsideRing { atom: usize },
    #[error("formal charge {0} outside [-4, 4]")]
    ChargeOutOfRange(i8),
    #[error("invalid bond: {0}")]
    InvalidBond(String),
    #[error("substructure search exceeded the cap of {cap} mappings")]
    MappingCapExceeded { cap: usize },
    #[error("fingerprint widths differ ({0} vs {1})")]
    WidthMismatch(usize, usize),
    #[error("fingerprint width {0} is not a power of two")]
    InvalidWidth(usize),
}
