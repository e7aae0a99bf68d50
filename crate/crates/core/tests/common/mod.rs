#![allow(dead_code)]

use std::path::PathBuf;

use proptest::prelude::*;
use safe_core::chem::{parse_smiles, Atom, Bond, BondOrder, Element, MolecularGraph};

pub fn corpus_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/corpus.smi")
}

pub fn corpus() -> Vec<String> {
    std::fs::read_to_string(corpus_path())
        .expect("bundled corpus")
        .lines()
        .map(str::to_string)
        .collect()
}

/// Every `step`-th corpus molecule, parsed.
pub fn corpus_sample(step: usize) -> Vec<(String, MolecularGraph)> {
    corpus()
        .into_iter()
        .step_by(step)
        .map(|s| {
            let m = parse_smiles(&s).unwrap();
            (s, m)
        })
        .collect()
}

const ELEMENTS: [(Element, u32); 6] = [
    (Element::C, 4),
    (Element::C, 4),
    (Element::N, 3),
    (Element::O, 2),
    (Element::S, 2),
    (Element::F, 1),
];

/// Aliphatic molecules built as a random tree plus extra ring bonds and
/// some double bonds, always within normal valence.
pub fn arb_molecule(max_atoms: usize) -> impl Strategy<Value = MolecularGraph> {
    (2..=max_atoms)
        .prop_flat_map(|n| {
            (
                prop::collection::vec(0..ELEMENTS.len(), n),
                prop::collection::vec(any::<prop::sample::Index>(), n),
                prop::collection::vec((any::<prop::sample::Index>(), any::<prop::sample::Index>()), 0..4),
                prop::collection::vec(any::<bool>(), n + 4),
            )
        })
        .prop_map(|(elements, parents, extra, doubles)| build_molecule(&elements, &parents, &extra, &doubles))
}

fn build_molecule(
    elements: &[usize],
    parents: &[prop::sample::Index],
    extra: &[(prop::sample::Index, prop::sample::Index)],
    doubles: &[bool],
) -> MolecularGraph {
    let n = elements.len();
    // the first atom is always carbon so that every tree can grow
    let spec: Vec<(Element, u32)> = (0..n)
        .map(|i| if i == 0 { ELEMENTS[0] } else { ELEMENTS[elements[i]] })
        .collect();
    let mut used = vec![0u32; n];
    let mut atoms = vec![Atom::new(spec[0].0)];
    let mut index = vec![usize::MAX; n];
    index[0] = 0;
    let mut bonds: Vec<Bond> = Vec::new();
    let mut has_bond = std::collections::HashSet::new();
    for i in 1..n {
        let open: Vec<usize> = (0..i).filter(|&j| index[j] != usize::MAX && used[j] < spec[j].1).collect();
        if open.is_empty() {
            continue;
        }
        let p = open[parents[i].index(open.len())];
        index[i] = atoms.len();
        atoms.push(Atom::new(spec[i].0));
        used[p] += 1;
        used[i] += 1;
        bonds.push(Bond::new(index[p], index[i], BondOrder::Single));
        has_bond.insert((index[p].min(index[i]), index[p].max(index[i])));
    }
    let placed: Vec<usize> = (0..n).filter(|&i| index[i] != usize::MAX).collect();
    for (a, b) in extra {
        let (x, y) = (placed[a.index(placed.len())], placed[b.index(placed.len())]);
        let key = (index[x].min(index[y]), index[x].max(index[y]));
        if x == y || has_bond.contains(&key) || used[x] >= spec[x].1 || used[y] >= spec[y].1 {
            continue;
        }
        used[x] += 1;
        used[y] += 1;
        has_bond.insert(key);
        bonds.push(Bond::new(index[x], index[y], BondOrder::Single));
    }
    let slot_of: Vec<usize> = {
        let mut s = vec![0; atoms.len()];
        for &i in &placed {
            s[index[i]] = i;
        }
        s
    };
    for (k, bond) in bonds.iter_mut().enumerate() {
        let (x, y) = (slot_of[bond.a], slot_of[bond.b]);
        if doubles[k % doubles.len()] && k % 3 == 0 && used[x] < spec[x].1 && used[y] < spec[y].1 {
            used[x] += 1;
            used[y] += 1;
            bond.order = BondOrder::Double;
        }
    }
    MolecularGraph::new(atoms, bonds).expect("generated graph is valid")
}

/// A uniformly random atom order, as a proptest strategy.
pub fn arb_order(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}
