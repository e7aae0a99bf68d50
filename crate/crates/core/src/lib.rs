//! SAFE molecular line notation toolkit.
//!
//! [`chem`] holds the molecular graph model and SMILES handling,
//! [`fragment`] decides where to cut molecules, [`codec`] turns cut
//! molecules into SAFE strings and back, [`tokenizer`] prepares text for
//! sequence models and [`genlab`] builds and checks constrained design
//! tasks.

pub mod chem;
pub mod codec;
pub mod fragment;
pub mod genlab;
pub mod tokenizer;
