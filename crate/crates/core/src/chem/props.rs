//! Simple molecular properties.

use super::element::Element;
use super::graph::MolecularGraph;

/// Average molecular weight in daltons, including implicit and bracket
/// hydrogens.
pub fn molecular_weight(mol: &MolecularGraph) -> f64 {
    (0..mol.atom_count())
        .map(|i| {
            let hydrogens = if mol.atom(i).is_wildcard() { 0 } else { mol.total_hydrogens(i) };
            mol.atom(i).element.mass() + f64::from(hydrogens) * Element::H.mass()
        })
        .sum()
}
