//! Set-level generation metrics and the property reward.

use std::collections::HashSet;

use crate::chem::{canonical_smiles, circular_fingerprint, molecular_weight, tanimoto, Fingerprint, MolecularGraph};
use crate::codec::decode_safe;

use super::error::GenlabError;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GenerationMetrics {
    /// Fraction of texts that decode to a molecule.
    pub validity: f64,
    /// Distinct canonical molecules over valid ones.
    pub uniqueness: f64,
    /// Mean pairwise Tanimoto distance among valid molecules.
    pub diversity: f64,
    /// Mean Tanimoto distance of valid molecules to the reference.
    pub distance_to_reference: Option<f64>,
}

/// Scores a batch of SAFE (or SMILES) texts. Diversity is 0 for fewer than
/// two valid molecules; every field is 0 when nothing is valid.
pub fn evaluate_set<S: AsRef<str>>(texts: &[S], reference: Option<&MolecularGraph>) -> GenerationMetrics {
    let valid: Vec<MolecularGraph> = texts.iter().filter_map(|t| decode_safe(t.as_ref()).ok()).collect();
    if valid.is_empty() {
        return GenerationMetrics {
            validity: 0.0,
            uniqueness: 0.0,
            diversity: 0.0,
            distance_to_reference: reference.map(|_| 0.0),
        };
    }
    let distinct: HashSet<String> = valid.iter().map(canonical_smiles).collect();
    let fps: Vec<_> = valid.iter().map(circular_fingerprint).collect();
    let distance = |a: &Fingerprint, b: &Fingerprint| 1.0 - tanimoto(a, b).expect("default fingerprints share a width");

    let mut total = 0.0;
    let mut pairs = 0usize;
    for i in 0..fps.len() {
        for j in i + 1..fps.len() {
            total += distance(&fps[i], &fps[j]);
            pairs += 1;
        }
    }
    let distance_to_reference = reference.map(|r| {
        let rfp = circular_fingerprint(r);
        fps.iter().map(|f| distance(f, &rfp)).sum::<f64>() / fps.len() as f64
    });
    GenerationMetrics {
        validity: valid.len() as f64 / texts.len() as f64,
        uniqueness: distinct.len() as f64 / valid.len() as f64,
        diversity: if pairs == 0 { 0.0 } else { total / pairs as f64 },
        distance_to_reference,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Property {
    MolecularWeight,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RewardSpec {
    pub target: f64,
    pub alpha: f64,
    pub property: Property,
}

impl RewardSpec {
    pub fn new(target: f64, alpha: f64, property: Property) -> Result<RewardSpec, GenlabError> {
        if !(alpha > 0.0) {
            return Err(GenlabError::InvalidAlpha(alpha));
        }
        Ok(RewardSpec { target, alpha, property })
    }

    /// Molecular-weight target with alpha 0.5.
    pub fn molecular_weight(target: f64) -> RewardSpec {
        RewardSpec {
            target,
            alpha: 0.5,
            property: Property::MolecularWeight,
        }
    }
}

/// `1 / (1 + alpha * |value - target|)`.
pub fn reward_for_value(value: f64, spec: &RewardSpec) -> f64 {
    1.0 / (1.0 + spec.alpha * (value - spec.target).abs())
}

pub fn property_reward(mol: &MolecularGraph, spec: &RewardSpec) -> f64 {
    let value = match spec.property {
        Property::MolecularWeight => molecular_weight(mol),
    };
    reward_for_value(value, spec)
}
