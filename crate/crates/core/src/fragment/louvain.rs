//! Louvain modularity optimization on small undirected graphs.

use std::collections::BTreeMap;

use crate::chem::{canonical_ranks, MolecularGraph};

use super::error::FragmentError;

pub const DEFAULT_RESOLUTION: f64 = 1.0;

#[derive(Clone, Debug, PartialEq)]
pub struct Partition {
    /// Community id per node, contiguous from 0 in order of first
    /// appearance.
    pub community_of: Vec<usize>,
    pub modularity: f64,
}

impl Partition {
    pub fn community_count(&self) -> usize {
        self.community_of.iter().max().map_or(0, |&m| m + 1)
    }
}

/// Newman modularity of an unweighted graph; 0 for a graph without edges.
pub fn modularity(n: usize, edges: &[(usize, usize)], community_of: &[usize], resolution: f64) -> f64 {
    if edges.is_empty() {
        return 0.0;
    }
    let m = edges.len() as f64;
    let communities = community_of.iter().max().map_or(0, |&c| c + 1);
    let mut internal = vec![0.0; communities];
    let mut degree = vec![0.0; communities];
    for &(a, b) in edges {
        if community_of[a] == community_of[b] {
            internal[community_of[a]] += 1.0;
        }
        degree[community_of[a]] += 1.0;
        degree[community_of[b]] += 1.0;
    }
    debug_assert_eq!(community_of.len(), n);
    (0..communities)
        .map(|c| internal[c] / m - resolution * (degree[c] / (2.0 * m)).powi(2))
        .sum()
}

/// Weighted graph used across aggregation levels. Self-loop weight counts
/// twice toward a node's degree.
#[derive(Clone)]
struct Level {
    adj: Vec<BTreeMap<usize, f64>>,
    self_loop: Vec<f64>,
    degree: Vec<f64>,
}

impl Level {
    fn from_edges(n: usize, edges: &[(usize, usize)]) -> Level {
        let mut adj = vec![BTreeMap::new(); n];
        let mut degree = vec![0.0; n];
        for &(a, b) in edges {
            *adj[a].entry(b).or_insert(0.0) += 1.0;
            *adj[b].entry(a).or_insert(0.0) += 1.0;
            degree[a] += 1.0;
            degree[b] += 1.0;
        }
        Level {
            adj,
            self_loop: vec![0.0; n],
            degree,
        }
    }

    fn len(&self) -> usize {
        self.adj.len()
    }

    /// Moves nodes (in index order) to the neighboring community with the
    /// largest strictly positive gain until no move helps. Returns whether
    /// anything moved.
    fn local_moves(&self, comm: &mut [usize], resolution: f64, two_m: f64) -> bool {
        let mut total = vec![0.0; self.len()];
        for (i, &c) in comm.iter().enumerate() {
            total[c] += self.degree[i];
        }
        let mut improved = false;
        loop {
            let mut moved = false;
            for i in 0..self.len() {
                let current = comm[i];
                total[current] -= self.degree[i];
                let mut links: BTreeMap<usize, f64> = BTreeMap::new();
                for (&j, &w) in &self.adj[i] {
                    *links.entry(comm[j]).or_insert(0.0) += w;
                }
                let gain = |c: usize, w: f64| w - resolution * total[c] * self.degree[i] / two_m;
                let mut best = current;
                let mut best_gain = gain(current, links.get(&current).copied().unwrap_or(0.0));
                for (&c, &w) in &links {
                    let g = gain(c, w);
                    if g > best_gain + 1e-12 {
                        best = c;
                        best_gain = g;
                    }
                }
                total[best] += self.degree[i];
                if best != current {
                    comm[i] = best;
                    moved = true;
                    improved = true;
                }
            }
            if !moved {
                return improved;
            }
        }
    }

    fn aggregate(&self, comm: &[usize], count: usize) -> Level {
        let mut adj = vec![BTreeMap::new(); count];
        let mut self_loop = vec![0.0; count];
        let mut degree = vec![0.0; count];
        for i in 0..self.len() {
            let ci = comm[i];
            degree[ci] += self.degree[i];
            self_loop[ci] += self.self_loop[i];
            for (&j, &w) in &self.adj[i] {
                let cj = comm[j];
                if ci == cj {
                    // each internal edge is seen from both ends
                    self_loop[ci] += w / 2.0;
                } else {
                    *adj[ci].entry(cj).or_insert(0.0) += w;
                }
            }
        }
        Level { adj, self_loop, degree }
    }
}

/// Renumbers community ids by first appearance; returns the count.
fn relabel(comm: &mut [usize]) -> usize {
    let mut map: BTreeMap<usize, usize> = BTreeMap::new();
    let mut next = 0;
    for c in comm.iter_mut() {
        let id = *map.entry(*c).or_insert_with(|| {
            next += 1;
            next - 1
        });
        *c = id;
    }
    next
}

/// One multilevel run starting from `start`: local moves, aggregate,
/// repeat until a level ends with every node in its own community.
fn multilevel(base: &Level, start: &[usize], resolution: f64, two_m: f64) -> Vec<usize> {
    let mut level = base.clone();
    let mut membership: Vec<usize> = (0..base.len()).collect();
    let mut comm = start.to_vec();
    relabel(&mut comm);
    loop {
        level.local_moves(&mut comm, resolution, two_m);
        let count = relabel(&mut comm);
        for m in membership.iter_mut() {
            *m = comm[*m];
        }
        if count == level.len() {
            return membership;
        }
        level = level.aggregate(&comm, count);
        comm = (0..count).collect();
    }
}

/// Louvain communities of an unweighted graph. Nodes are visited in the
/// order given by `order` (a permutation of `0..n`). Multilevel passes are
/// repeated from the previous result until the partition is stable.
pub fn louvain(n: usize, edges: &[(usize, usize)], resolution: f64, order: &[usize]) -> Partition {
    assert_eq!(order.len(), n, "order must be a permutation of the nodes");
    if edges.is_empty() {
        let community_of: Vec<usize> = (0..n).collect();
        return Partition {
            community_of,
            modularity: 0.0,
        };
    }
    // position of each node in visit order
    let mut pos = vec![0; n];
    for (k, &v) in order.iter().enumerate() {
        pos[v] = k;
    }
    let reordered: Vec<(usize, usize)> = edges.iter().map(|&(a, b)| (pos[a], pos[b])).collect();
    let base = Level::from_edges(n, &reordered);
    let two_m = 2.0 * edges.len() as f64;

    let mut current: Vec<usize> = (0..n).collect();
    let mut best_q = modularity(n, &reordered, &current, resolution);
    loop {
        let mut next = multilevel(&base, &current, resolution, two_m);
        relabel(&mut next);
        let q = modularity(n, &reordered, &next, resolution);
        if next == current || q <= best_q + 1e-12 {
            break;
        }
        current = next;
        best_q = q;
    }

    let mut community_of: Vec<usize> = (0..n).map(|v| current[pos[v]]).collect();
    relabel(&mut community_of);
    let modularity = modularity(n, edges, &community_of, resolution);
    Partition {
        community_of,
        modularity,
    }
}

/// Louvain over the heavy-atom graph, visiting atoms by ascending canonical
/// rank. Hydrogen atoms join the community of their neighbor.
pub fn louvain_communities(mol: &MolecularGraph, resolution: f64) -> Result<Partition, FragmentError> {
    let nodes: Vec<usize> = (0..mol.atom_count())
        .filter(|&i| !mol.atom(i).element.is_hydrogen())
        .collect();
    if nodes.len() < 2 {
        return Err(FragmentError::TooSmall { atoms: nodes.len() });
    }
    let mut node_of = vec![usize::MAX; mol.atom_count()];
    for (k, &a) in nodes.iter().enumerate() {
        node_of[a] = k;
    }
    let edges: Vec<(usize, usize)> = mol
        .bonds()
        .iter()
        .filter(|b| node_of[b.a] != usize::MAX && node_of[b.b] != usize::MAX)
        .map(|b| (node_of[b.a], node_of[b.b]))
        .collect();
    let ranks = canonical_ranks(mol);
    let mut order: Vec<usize> = (0..nodes.len()).collect();
    order.sort_by_key(|&k| ranks[nodes[k]]);
    let part = louvain(nodes.len(), &edges, resolution, &order);

    let fresh = part.community_count();
    let mut community_of: Vec<usize> = (0..mol.atom_count())
        .map(|i| {
            if node_of[i] != usize::MAX {
                return part.community_of[node_of[i]];
            }
            mol.neighbors(i)
                .iter()
                .find(|&&(nb, _)| node_of[nb] != usize::MAX)
                .map_or(fresh + i, |&(nb, _)| part.community_of[node_of[nb]])
        })
        .collect();
    relabel(&mut community_of);
    Ok(Partition {
        community_of,
        modularity: part.modularity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chem::parse_smiles;

    fn identity(n: usize) -> Vec<usize> {
        (0..n).collect()
    }

    #[test]
    fn two_triangles() {
        let edges = [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5), (5, 3)];
        let p = louvain(6, &edges, 1.0, &identity(6));
        assert_eq!(p.community_of, vec![0, 0, 0, 1, 1, 1]);
        assert!((p.modularity - 5.0 / 14.0).abs() < 1e-12);
    }

    #[test]
    fn complete_graph_stays_whole() {
        let edges = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        let p = louvain(4, &edges, 1.0, &identity(4));
        assert_eq!(p.community_count(), 1);
        assert!(p.modularity.abs() < 1e-12);
    }

    #[test]
    fn molecule_wrapper() {
        let mol = parse_smiles("C1CC1C1CC1").unwrap();
        let p = louvain_communities(&mol, 1.0).unwrap();
        assert_eq!(p.community_count(), 2);
        assert_eq!(p.community_of[0], p.community_of[1]);
        assert_ne!(p.community_of[0], p.community_of[3]);
        assert!(matches!(
            louvain_communities(&parse_smiles("C").unwrap(), 1.0),
            Err(FragmentError::TooSmall { atoms: 1 })
        ));
    }

    #[test]
    fn singletons_modularity_is_a_lower_bound() {
        let edges = [(0, 1), (1, 2), (2, 3)];
        let p = louvain(4, &edges, 1.0, &identity(4));
        assert!(p.modularity >= modularity(4, &edges, &identity(4), 1.0));
    }
}
