//! Community-based cut bonds for molecules no rule applies to.

use crate::chem::MolecularGraph;

use super::louvain::louvain_communities;
use super::rules::is_cuttable;

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut root = x;
    while parent[root] != root {
        root = parent[root];
    }
    let mut cur = x;
    while parent[cur] != root {
        let next = parent[cur];
        parent[cur] = root;
        cur = next;
    }
    root
}

/// Cuttable bonds between Louvain communities. Adjacent communities whose
/// shared boundary consists of ring bonds only are merged first (repeatedly,
/// as merging changes boundaries), so rings are never split. Molecules with
/// fewer than two heavy atoms yield no cuts.
pub fn fallback_cut_bonds(mol: &MolecularGraph, resolution: f64) -> Vec<usize> {
    let Ok(partition) = louvain_communities(mol, resolution) else {
        return Vec::new();
    };
    let count = partition.community_count();
    let mut parent: Vec<usize> = (0..count).collect();
    loop {
        // per unordered pair of groups: (any acyclic bond, any bond)
        let mut boundary: std::collections::BTreeMap<(usize, usize), bool> = Default::default();
        for b in mol.bonds() {
            let ca = find(&mut parent, partition.community_of[b.a]);
            let cb = find(&mut parent, partition.community_of[b.b]);
            if ca != cb {
                let key = (ca.min(cb), ca.max(cb));
                let acyclic = boundary.entry(key).or_insert(false);
                *acyclic |= !b.in_ring;
            }
        }
        let mut merged = false;
        for ((a, b), has_acyclic) in boundary {
            if !has_acyclic {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                if ra != rb {
                    parent[ra.max(rb)] = ra.min(rb);
                    merged = true;
                }
            }
        }
        if !merged {
            break;
        }
    }
    (0..mol.bond_count())
        .filter(|&bi| {
            let b = mol.bond(bi);
            is_cuttable(mol, bi)
                && find(&mut parent, partition.community_of[b.a]) != find(&mut parent, partition.community_of[b.b])
        })
        .collect()
}
