//! Molecular graphs, SMILES reading and writing, and graph algorithms.

mod canon;
mod element;
mod error;
mod fingerprint;
mod graph;
mod matching;
mod parse;
mod props;
mod rings;
mod write;

pub use canon::canonical_ranks;
pub use element::Element;
pub use error::ChemError;
pub use fingerprint::{circular_fingerprint, circular_fingerprint_with, tanimoto, Fingerprint, DEFAULT_RADIUS, DEFAULT_WIDTH};
pub use graph::{Atom, Bond, BondDirection, BondOrder, MolecularGraph};
pub use matching::{
    has_substructure, is_isomorphic, match_substructure, match_substructure_with, Mapping, MatchOptions,
    DEFAULT_MAPPING_CAP,
};
pub use parse::{parse_smiles, parse_smiles_with, OpenRing, ParseOptions, ParsedSmiles};
pub use props::molecular_weight;
pub use rings::{ring_info, sssr, RingInfo};
pub use write::{max_ring_digit, write_smiles};

pub(crate) use canon::canonical_ranks_marked;
pub(crate) use matching::has_anchored_match;
pub(crate) use write::{render_label, BlockWriter, Piece};

/// Canonical SMILES of `mol`.
pub fn canonical_smiles(mol: &MolecularGraph) -> String {
    write_smiles(mol, true, None)
}
