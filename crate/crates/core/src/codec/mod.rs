//! SAFE strings: molecules written as dot-separated fragment blocks whose
//! inter-fragment bonds are ring-closure labels.

mod error;
mod layout;
mod safe;

pub use error::CodecError;
pub use safe::{
    canonical_safe, decode_safe, encode_safe, encode_with_cuts, list_fragments, randomize_safe, CutSource,
    EncodeReport, SafeString,
};

pub(crate) use layout::{render_blocks, split_blocks};
