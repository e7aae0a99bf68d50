//! Canonical atom ranking by iterative neighborhood refinement.

use super::graph::MolecularGraph;

/// Ranks every atom so that isomorphic graphs receive the same ranking up
/// to automorphism. The result is a permutation of `0..n`.
///
/// Atoms start from an invariant of element, charge, degree, aromaticity,
/// ring membership and hydrogen count (plus isotope and any verbatim
/// bracket text, so that stereo-tagged atoms never tie with plain ones).
/// Classes are split by sorted neighbor rank/bond-order lists until
/// stable; remaining ties are broken on the lowest tied rank and refined
/// again.
pub fn canonical_ranks(mol: &MolecularGraph) -> Vec<usize> {
    canonical_ranks_marked(mol, &[])
}

/// Like [`canonical_ranks`], with bonds flagged in `marked` treated as a
/// distinct bond kind, so that ranks also respect a chosen bond subset.
pub(crate) fn canonical_ranks_marked(mol: &MolecularGraph, marked: &[bool]) -> Vec<usize> {
    let n = mol.atom_count();
    if n == 0 {
        return Vec::new();
    }
    let keys: Vec<_> = (0..n)
        .map(|i| {
            let a = mol.atom(i);
            (
                a.element.atomic_number(),
                a.formal_charge,
                mol.degree(i),
                a.aromatic,
                mol.atom_in_ring(i),
                mol.total_hydrogens(i),
                a.isotope.unwrap_or(0),
                a.bracket_raw.clone().unwrap_or_default(),
            )
        })
        .collect();
    let mut ranks = rank_by_keys(&keys);
    let codes: Vec<u8> = (0..mol.bond_count())
        .map(|bi| mol.bond(bi).order.code() + if marked.get(bi).copied().unwrap_or(false) { 16 } else { 0 })
        .collect();
    refine(mol, &codes, &mut ranks);
    loop {
        let Some(tied) = lowest_tied_rank(&ranks) else { break };
        let chosen = (0..n).find(|&i| ranks[i] == tied).expect("tied rank has members");
        for (i, r) in ranks.iter_mut().enumerate() {
            if *r == tied && i != chosen {
                *r = tied + 1;
            }
        }
        refine(mol, &codes, &mut ranks);
    }
    ranks
}

/// Rank = number of atoms with a strictly smaller key; tied atoms share a
/// rank.
fn rank_by_keys<K: Ord>(keys: &[K]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..keys.len()).collect();
    order.sort_by(|&a, &b| keys[a].cmp(&keys[b]));
    let mut ranks = vec![0; keys.len()];
    for (pos, &i) in order.iter().enumerate() {
        ranks[i] = if pos > 0 && keys[order[pos - 1]] == keys[i] {
            ranks[order[pos - 1]]
        } else {
            pos
        };
    }
    ranks
}

fn class_count(ranks: &[usize]) -> usize {
    let mut sorted = ranks.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    sorted.len()
}

fn refine(mol: &MolecularGraph, codes: &[u8], ranks: &mut Vec<usize>) {
    let mut classes = class_count(ranks);
    loop {
        let keys: Vec<(usize, Vec<(usize, u8)>)> = (0..ranks.len())
            .map(|i| {
                let mut env: Vec<(usize, u8)> = mol
                    .neighbors(i)
                    .iter()
                    .map(|&(nb, bi)| (ranks[nb], codes[bi]))
                    .collect();
                env.sort_unstable();
                (ranks[i], env)
            })
            .collect();
        let next = rank_by_keys(&keys);
        let next_classes = class_count(&next);
        *ranks = next;
        if next_classes == classes {
            break;
        }
        classes = next_classes;
    }
}

fn lowest_tied_rank(ranks: &[usize]) -> Option<usize> {
    let mut counts = vec![0usize; ranks.len()];
    for &r in ranks {
        counts[r] += 1;
    }
    counts.iter().position(|&c| c > 1)
}
