mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use safe_core::chem::{
    canonical_ranks, canonical_smiles, circular_fingerprint, is_isomorphic, match_substructure, molecular_weight,
    parse_smiles, ring_info, sssr, tanimoto, write_smiles, Element, MolecularGraph,
};

use common::{arb_molecule, corpus_sample};

fn shuffled(mol: &MolecularGraph, rng: &mut ChaCha8Rng) -> MolecularGraph {
    let mut order: Vec<usize> = (0..mol.atom_count()).collect();
    order.shuffle(rng);
    mol.permuted(&order)
}

/// All injective maps that preserve atoms and pattern bonds, by exhaustive
/// enumeration.
fn brute_force_mappings(pattern: &MolecularGraph, target: &MolecularGraph) -> BTreeSet<Vec<usize>> {
    fn extend(p: &MolecularGraph, t: &MolecularGraph, map: &mut Vec<usize>, out: &mut BTreeSet<Vec<usize>>) {
        let i = map.len();
        if i == p.atom_count() {
            let bonds_ok = p.bonds().iter().all(|b| {
                t.bond_between(map[b.a], map[b.b])
                    .is_some_and(|tb| t.bond(tb).order == b.order)
            });
            if bonds_ok {
                out.insert(map.clone());
            }
            return;
        }
        for j in 0..t.atom_count() {
            if map.contains(&j) {
                continue;
            }
            let (pa, ta) = (p.atom(i), t.atom(j));
            let atom_ok = pa.element == Element::WILDCARD
                || (pa.element == ta.element && pa.aromatic == ta.aromatic && pa.formal_charge == ta.formal_charge);
            if atom_ok {
                map.push(j);
                extend(p, t, map, out);
                map.pop();
            }
        }
    }
    let mut out = BTreeSet::new();
    extend(pattern, target, &mut Vec::new(), &mut out);
    out
}

/// Sizes of a minimum cycle basis: every simple cycle, taken shortest first
/// and kept when independent over GF(2).
fn brute_force_ring_sizes(mol: &MolecularGraph) -> Vec<usize> {
    let nb = mol.bond_count();
    let mut cycles: BTreeSet<Vec<usize>> = BTreeSet::new();
    // simple cycles through their lowest atom, found by DFS
    fn dfs(
        mol: &MolecularGraph,
        start: usize,
        at: usize,
        seen: &mut Vec<bool>,
        path: &mut Vec<usize>,
        out: &mut BTreeSet<Vec<usize>>,
    ) {
        for &(next, bi) in mol.neighbors(at) {
            if next == start && path.len() >= 2 && !path.contains(&bi) {
                let mut c = path.clone();
                c.push(bi);
                c.sort_unstable();
                out.insert(c);
            } else if next > start && !seen[next] {
                seen[next] = true;
                path.push(bi);
                dfs(mol, start, next, seen, path, out);
                path.pop();
                seen[next] = false;
            }
        }
    }
    for start in 0..mol.atom_count() {
        let mut seen = vec![false; mol.atom_count()];
        seen[start] = true;
        dfs(mol, start, start, &mut seen, &mut Vec::new(), &mut cycles);
    }
    let mut cycles: Vec<Vec<usize>> = cycles.into_iter().collect();
    cycles.sort_by_key(Vec::len);
    let mut basis: Vec<Vec<bool>> = Vec::new();
    let mut sizes = Vec::new();
    for c in cycles {
        let mut v = vec![false; nb];
        for &b in &c {
            v[b] = true;
        }
        for row in &basis {
            let pivot = row.iter().position(|&x| x).unwrap();
            if v[pivot] {
                for (x, y) in v.iter_mut().zip(row) {
                    *x ^= y;
                }
            }
        }
        if v.iter().any(|&x| x) {
            // keep rows in reduced form so pivots stay unique
            let pivot = v.iter().position(|&x| x).unwrap();
            for row in basis.iter_mut() {
                if row[pivot] {
                    for (x, y) in row.iter_mut().zip(&v) {
                        *x ^= y;
                    }
                }
            }
            basis.push(v);
            sizes.push(c.len());
        }
    }
    sizes.sort_unstable();
    sizes
}

fn is_simple_cycle(mol: &MolecularGraph, ring: &[usize]) -> bool {
    let mut degree = std::collections::HashMap::new();
    for &bi in ring {
        let b = mol.bond(bi);
        *degree.entry(b.a).or_insert(0) += 1;
        *degree.entry(b.b).or_insert(0) += 1;
    }
    if degree.values().any(|&d| d != 2) || degree.len() != ring.len() {
        return false;
    }
    // connected: walk from one atom along ring bonds
    let start = mol.bond(ring[0]).a;
    let mut seen = BTreeSet::from([start]);
    let mut stack = vec![start];
    while let Some(u) = stack.pop() {
        for &bi in ring {
            let b = mol.bond(bi);
            if b.contains(u) && seen.insert(b.other(u)) {
                stack.push(b.other(u));
            }
        }
    }
    seen.len() == degree.len()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn written_smiles_reparse_isomorphic(mol in arb_molecule(12)) {
        for canonical in [false, true] {
            let text = write_smiles(&mol, canonical, None);
            let back = parse_smiles(&text).unwrap();
            prop_assert!(is_isomorphic(&mol, &back), "{}", text);
        }
    }

    #[test]
    fn rooted_writing_starts_at_root(mol in arb_molecule(10), pick in any::<prop::sample::Index>()) {
        let root = pick.index(mol.atom_count());
        let text = write_smiles(&mol, true, Some(root));
        let back = parse_smiles(&text).unwrap();
        prop_assert!(is_isomorphic(&mol, &back));
        prop_assert_eq!(back.atom(0).element, mol.atom(root).element);
    }

    #[test]
    fn canonical_output_ignores_atom_order(mol in arb_molecule(12), seed in any::<u64>()) {
        let expected = canonical_smiles(&mol);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..100 {
            prop_assert_eq!(canonical_smiles(&shuffled(&mol, &mut rng)), expected.clone());
        }
    }

    #[test]
    fn canonical_ranks_are_a_permutation(mol in arb_molecule(12)) {
        let mut ranks = canonical_ranks(&mol);
        ranks.sort_unstable();
        prop_assert_eq!(ranks, (0..mol.atom_count()).collect::<Vec<_>>());
    }

    #[test]
    fn tanimoto_properties(a in arb_molecule(10), b in arb_molecule(10), seed in any::<u64>()) {
        let (fa, fb) = (circular_fingerprint(&a), circular_fingerprint(&b));
        let ab = tanimoto(&fa, &fb).unwrap();
        prop_assert_eq!(ab, tanimoto(&fb, &fa).unwrap());
        prop_assert!((0.0..=1.0).contains(&ab));
        prop_assert_eq!(tanimoto(&fa, &fa).unwrap(), 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        prop_assert_eq!(circular_fingerprint(&shuffled(&a, &mut rng)), fa);
    }

    #[test]
    fn ring_info_matches_cycle_enumeration(mol in arb_molecule(10)) {
        let info = ring_info(&mol);
        prop_assert_eq!(&info.ring_sizes, &brute_force_ring_sizes(&mol));
        prop_assert_eq!(info.ring_sizes.len(), mol.cycle_rank());
        prop_assert_eq!(info.max_ring_size == 0, mol.cycle_rank() == 0);
        prop_assert_eq!(info.max_ring_size, info.ring_sizes.iter().copied().max().unwrap_or(0));
        for ring in sssr(&mol) {
            prop_assert!(is_simple_cycle(&mol, &ring));
        }
    }

    #[test]
    fn matcher_equals_brute_force(pattern in arb_molecule(5), target in arb_molecule(8)) {
        let found: BTreeSet<Vec<usize>> = match_substructure(&pattern, &target, None).unwrap().into_iter().collect();
        prop_assert_eq!(found, brute_force_mappings(&pattern, &target));
    }
}

#[test]
fn corpus_canonical_form_is_stable_under_permutation() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (smiles, mol) in corpus_sample(10) {
        let expected = canonical_smiles(&mol);
        for _ in 0..100 {
            assert_eq!(canonical_smiles(&shuffled(&mol, &mut rng)), expected, "{smiles}");
        }
    }
}

#[test]
fn corpus_round_trips_through_writer() {
    for (smiles, mol) in corpus_sample(1) {
        for canonical in [false, true] {
            let back = parse_smiles(&write_smiles(&mol, canonical, None)).unwrap();
            assert!(is_isomorphic(&mol, &back), "{smiles}");
        }
    }
}

#[test]
fn corpus_ring_info_matches_cycle_enumeration() {
    for (smiles, mol) in corpus_sample(3) {
        assert_eq!(ring_info(&mol).ring_sizes, brute_force_ring_sizes(&mol), "{smiles}");
    }
}

#[test]
fn naphthalene_rings() {
    let info = ring_info(&parse_smiles("c1ccc2ccccc2c1").unwrap());
    assert_eq!(info.ring_sizes, vec![6, 6]);
    assert_eq!(info.max_ring_size, 6);
}

#[test]
fn molecular_weights() {
    let mw = |s| molecular_weight(&parse_smiles(s).unwrap());
    assert!((mw("C") - 16.043).abs() <= 0.001);
    assert!((mw("O") - 18.015).abs() <= 0.001);
    let h2 = 2.0 * (mw("C") - mw("[C]")) / 4.0;
    assert!((mw("CC") - (2.0 * mw("C") - h2)).abs() <= 0.001);
}

#[test]
fn spelling_and_permutation_share_fingerprints() {
    let a = parse_smiles("CC(=O)Nc1ccccc1").unwrap();
    let b = parse_smiles("c1ccc(cc1)NC(C)=O").unwrap();
    assert!(is_isomorphic(&a, &b));
    assert_eq!(circular_fingerprint(&a), circular_fingerprint(&b));
    assert_eq!(canonical_smiles(&a), canonical_smiles(&b));
}
