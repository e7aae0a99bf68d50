//! Choosing cut bonds and slicing molecules into fragments.

mod error;
mod fallback;
mod louvain;
mod rules;
mod slice;

pub use error::FragmentError;
pub use fallback::fallback_cut_bonds;
pub use louvain::{louvain, louvain_communities, modularity, Partition, DEFAULT_RESOLUTION};
pub use rules::{default_rules, detect_cut_bonds, load_rules, parse_rules, BondCutRule, RuleSide, DEFAULT_RULES};
pub use slice::{fragment_molecule, reassemble, AttachmentPoint, Fragment};

pub(crate) use slice::pieces;
