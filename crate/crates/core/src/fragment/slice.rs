//! Slicing a molecule along cut bonds.

use crate::chem::{Bond, BondOrder, MolecularGraph};

use super::error::FragmentError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttachmentPoint {
    /// Atom index within the fragment graph.
    pub fragment_atom: usize,
    /// Shared by exactly two attachment points across a fragment set.
    pub label: u16,
    pub cut_bond_order: BondOrder,
}

#[derive(Clone, Debug)]
pub struct Fragment {
    pub graph: MolecularGraph,
    pub attachments: Vec<AttachmentPoint>,
    pub heavy_atom_count: usize,
    /// Atom index in the source molecule for every fragment atom; empty
    /// when the fragment was not cut from a known molecule.
    pub source_atoms: Vec<usize>,
}

impl Fragment {
    pub fn new(graph: MolecularGraph, attachments: Vec<AttachmentPoint>, source_atoms: Vec<usize>) -> Fragment {
        let heavy_atom_count = graph.heavy_atom_count();
        Fragment {
            graph,
            attachments,
            heavy_atom_count,
            source_atoms,
        }
    }
}

/// Connected components of `mol` after removing the bonds flagged in
/// `cut`, each listed in ascending atom order; components are ordered by
/// their first atom.
pub(crate) fn pieces(mol: &MolecularGraph, cut: &[bool]) -> Vec<Vec<usize>> {
    let n = mol.atom_count();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut members = vec![start];
        let mut stack = vec![start];
        while let Some(u) = stack.pop() {
            for &(v, bi) in mol.neighbors(u) {
                if !cut[bi] && !seen[v] {
                    seen[v] = true;
                    members.push(v);
                    stack.push(v);
                }
            }
        }
        members.sort_unstable();
        out.push(members);
    }
    out
}

/// Cuts `mol` along `cut_bonds`. Cut bond number `k` (in ascending bond
/// index order) leaves a pair of attachment points labeled `k + 1`.
pub fn fragment_molecule(mol: &MolecularGraph, cut_bonds: &[usize]) -> Result<Vec<Fragment>, FragmentError> {
    let mut bonds = cut_bonds.to_vec();
    bonds.sort_unstable();
    bonds.dedup();
    let mut cut = vec![false; mol.bond_count()];
    let mut label_of = vec![0u16; mol.bond_count()];
    for (k, &bi) in bonds.iter().enumerate() {
        if bi >= mol.bond_count() {
            return Err(FragmentError::InvalidBondIndex { bond: bi });
        }
        if mol.bond(bi).in_ring {
            return Err(FragmentError::RingBondCut { bond: bi });
        }
        cut[bi] = true;
        label_of[bi] = u16::try_from(k + 1).expect("label fits in u16");
    }

    let mut fragments = Vec::new();
    for members in pieces(mol, &cut) {
        let (graph, _) = mol.subgraph(&members);
        let mut attachments = Vec::new();
        for (local, &atom) in members.iter().enumerate() {
            for &(_, bi) in mol.neighbors(atom) {
                if cut[bi] {
                    attachments.push(AttachmentPoint {
                        fragment_atom: local,
                        label: label_of[bi],
                        cut_bond_order: mol.bond(bi).order,
                    });
                }
            }
        }
        attachments.sort_by_key(|a| a.label);
        fragments.push(Fragment::new(graph, attachments, members));
    }
    Ok(fragments)
}

/// Joins fragments back together by bonding attachment points that share
/// a label. Unpaired attachment points are left open.
pub fn reassemble(fragments: &[Fragment]) -> Result<MolecularGraph, FragmentError> {
    let mut atoms = Vec::new();
    let mut bonds = Vec::new();
    let mut open: Vec<(u16, usize, BondOrder)> = Vec::new();
    for frag in fragments {
        let offset = atoms.len();
        atoms.extend(frag.graph.atoms().iter().cloned());
        bonds.extend(frag.graph.bonds().iter().map(|b| Bond {
            a: b.a + offset,
            b: b.b + offset,
            ..b.clone()
        }));
        for ap in &frag.attachments {
            let atom = ap.fragment_atom + offset;
            if let Some(k) = open.iter().position(|&(l, _, _)| l == ap.label) {
                let (_, partner, order) = open.swap_remove(k);
                bonds.push(Bond::new(partner, atom, order));
            } else {
                open.push((ap.label, atom, ap.cut_bond_order));
            }
        }
    }
    Ok(MolecularGraph::new(atoms, bonds)?)
}
