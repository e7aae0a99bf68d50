//! Smallest set of smallest rings.

use std::collections::{HashSet, VecDeque};

use super::graph::MolecularGraph;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingInfo {
    /// One entry per ring of the cover, ascending.
    pub ring_sizes: Vec<usize>,
    pub max_ring_size: usize,
}

/// Ring sizes from a minimum cycle basis (Horton candidate cycles reduced
/// greedily over GF(2)).
pub fn ring_info(mol: &MolecularGraph) -> RingInfo {
    let rings = sssr(mol);
    let mut ring_sizes: Vec<usize> = rings.iter().map(|r| r.len()).collect();
    ring_sizes.sort_unstable();
    RingInfo {
        max_ring_size: ring_sizes.last().copied().unwrap_or(0),
        ring_sizes,
    }
}

/// Rings as bond-index lists.
pub fn sssr(mol: &MolecularGraph) -> Vec<Vec<usize>> {
    let rank = mol.cycle_rank();
    if rank == 0 {
        return Vec::new();
    }
    let nb = mol.bond_count();
    let words = nb.div_ceil(64);
    let mut candidates: Vec<Vec<u64>> = Vec::new();
    let mut seen: HashSet<Vec<u64>> = HashSet::new();

    for root in 0..mol.atom_count() {
        if !mol.atom_in_ring(root) {
            continue;
        }
        let (parent, dist) = bfs_tree(mol, root);
        for (bi, bond) in mol.bonds().iter().enumerate() {
            if !bond.in_ring || dist[bond.a] == usize::MAX || dist[bond.b] == usize::MAX {
                continue;
            }
            if parent[bond.a] == Some(bi) || parent[bond.b] == Some(bi) {
                continue;
            }
            let path_a = path_to_root(mol, &parent, bond.a);
            let path_b = path_to_root(mol, &parent, bond.b);
            let atoms_a: HashSet<usize> = path_atoms(mol, bond.a, &path_a);
            let atoms_b: HashSet<usize> = path_atoms(mol, bond.b, &path_b);
            if atoms_a.intersection(&atoms_b).count() != 1 {
                continue;
            }
            let mut set = vec![0u64; words];
            for &e in path_a.iter().chain(&path_b).chain(std::iter::once(&bi)) {
                set[e / 64] |= 1 << (e % 64);
            }
            if seen.insert(set.clone()) {
                candidates.push(set);
            }
        }
    }
    candidates.sort_by_key(|c| c.iter().map(|w| w.count_ones()).sum::<u32>());

    let mut basis: Vec<(usize, Vec<u64>)> = Vec::new();
    let mut chosen = Vec::new();
    for cand in candidates {
        if chosen.len() == rank {
            break;
        }
        let mut v = cand.clone();
        for (pivot, row) in &basis {
            if v[pivot / 64] >> (pivot % 64) & 1 == 1 {
                for (x, y) in v.iter_mut().zip(row) {
                    *x ^= y;
                }
            }
        }
        if let Some(pivot) = lowest_bit(&v) {
            basis.push((pivot, v));
            chosen.push((0..nb).filter(|&e| cand[e / 64] >> (e % 64) & 1 == 1).collect());
        }
    }
    chosen
}

fn lowest_bit(v: &[u64]) -> Option<usize> {
    v.iter()
        .enumerate()
        .find(|(_, w)| **w != 0)
        .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
}

fn bfs_tree(mol: &MolecularGraph, root: usize) -> (Vec<Option<usize>>, Vec<usize>) {
    let n = mol.atom_count();
    let mut parent = vec![None; n];
    let mut dist = vec![usize::MAX; n];
    dist[root] = 0;
    let mut queue = VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        for &(v, bi) in mol.neighbors(u) {
            if mol.bond(bi).in_ring && dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                parent[v] = Some(bi);
                queue.push_back(v);
            }
        }
    }
    (parent, dist)
}

fn path_to_root(mol: &MolecularGraph, parent: &[Option<usize>], mut atom: usize) -> Vec<usize> {
    let mut path = Vec::new();
    while let Some(bi) = parent[atom] {
        path.push(bi);
        atom = mol.bond(bi).other(atom);
    }
    path
}

fn path_atoms(mol: &MolecularGraph, start: usize, path: &[usize]) -> HashSet<usize> {
    let mut atoms = HashSet::from([start]);
    let mut cur = start;
    for &bi in path {
        cur = mol.bond(bi).other(cur);
        atoms.insert(cur);
    }
    atoms
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chem::parse_smiles;

    fn info(s: &str) -> RingInfo {
        ring_info(&parse_smiles(s).unwrap())
    }

    #[test]
    fn acyclic() {
        assert_eq!(
            info("CCC"),
            RingInfo {
                ring_sizes: vec![],
                max_ring_size: 0
            }
        );
    }

    #[test]
    fn small_rings() {
        assert_eq!(info("C1CC1").ring_sizes, vec![3]);
        assert_eq!(info("c1ccc2ccccc2c1").ring_sizes, vec![6, 6]);
        assert_eq!(info("C1CC2CCC1C2").ring_sizes, vec![5, 5]);
        assert_eq!(info("C1CCCCCCC1").max_ring_size, 8);
        assert_eq!(info("C12C3C4C1C5C2C3C45").ring_sizes, vec![4, 4, 4, 4, 4]);
    }
}
