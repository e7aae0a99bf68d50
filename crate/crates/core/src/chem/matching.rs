//! Substructure search by backtracking with VF2-style candidate ordering.

use super::element::Element;
use super::error::ChemError;
use super::graph::MolecularGraph;

pub const DEFAULT_MAPPING_CAP: usize = 10_000;

/// `mapping[p]` is the target atom matched to pattern atom `p`.
pub type Mapping = Vec<usize>;

#[derive(Clone, Copy, Debug)]
pub struct MatchOptions {
    /// Pattern atoms of this element match any target atom.
    pub wildcard: Option<Element>,
    /// Maximum number of mappings collected before giving up.
    pub cap: usize,
}

impl Default for MatchOptions {
    fn default() -> Self {
        MatchOptions {
            wildcard: Some(Element::WILDCARD),
            cap: DEFAULT_MAPPING_CAP,
        }
    }
}

/// Enumerates every injective mapping of `pattern` into `target` that
/// preserves atoms (element, aromaticity, charge; wildcard pattern atoms
/// match anything) and bonds (existence and order).
pub fn match_substructure(
    pattern: &MolecularGraph,
    target: &MolecularGraph,
    wildcard: Option<Element>,
) -> Result<Vec<Mapping>, ChemError> {
    match_substructure_with(
        pattern,
        target,
        MatchOptions {
            wildcard,
            ..MatchOptions::default()
        },
    )
}

pub fn match_substructure_with(
    pattern: &MolecularGraph,
    target: &MolecularGraph,
    options: MatchOptions,
) -> Result<Vec<Mapping>, ChemError> {
    let mut search = Search::new(pattern, target, options.wildcard, &[], &[], false);
    let mut found = Vec::new();
    let mut overflow = false;
    search.run(&mut |m| {
        if found.len() == options.cap {
            overflow = true;
            return false;
        }
        found.push(m.to_vec());
        true
    });
    if overflow {
        return Err(ChemError::MappingCapExceeded { cap: options.cap });
    }
    Ok(found)
}

/// Whether at least one mapping exists.
pub fn has_substructure(pattern: &MolecularGraph, target: &MolecularGraph, wildcard: Option<Element>) -> bool {
    let mut search = Search::new(pattern, target, wildcard, &[], &[], false);
    let mut hit = false;
    search.run(&mut |_| {
        hit = true;
        false
    });
    hit
}

/// Graph isomorphism on element, charge, aromaticity and bond order.
pub fn is_isomorphic(a: &MolecularGraph, b: &MolecularGraph) -> bool {
    if a.atom_count() != b.atom_count() || a.bond_count() != b.bond_count() {
        return false;
    }
    let mut search = Search::new(a, b, None, &[], &[], true);
    let mut hit = false;
    search.run(&mut |_| {
        hit = true;
        false
    });
    hit
}

/// Existence of a mapping that sends each `(pattern, target)` anchor pair
/// as given and never uses a `forbidden` target atom.
pub(crate) fn has_anchored_match(
    pattern: &MolecularGraph,
    target: &MolecularGraph,
    wildcard: Option<Element>,
    anchors: &[(usize, usize)],
    forbidden: &[usize],
) -> bool {
    let mut search = Search::new(pattern, target, wildcard, anchors, forbidden, false);
    let mut hit = false;
    search.run(&mut |_| {
        hit = true;
        false
    });
    hit
}

const UNMAPPED: usize = usize::MAX;

struct Search<'a> {
    pattern: &'a MolecularGraph,
    target: &'a MolecularGraph,
    wildcard: Option<Element>,
    exact_degree: bool,
    /// Pattern atoms in matching order.
    order: Vec<usize>,
    /// Fixed target for pattern atoms that are anchored.
    anchor_of: Vec<usize>,
    mapping: Vec<usize>,
    used: Vec<bool>,
}

impl<'a> Search<'a> {
    fn new(
        pattern: &'a MolecularGraph,
        target: &'a MolecularGraph,
        wildcard: Option<Element>,
        anchors: &[(usize, usize)],
        forbidden: &[usize],
        exact_degree: bool,
    ) -> Self {
        let np = pattern.atom_count();
        let mut anchor_of = vec![UNMAPPED; np];
        for &(p, t) in anchors {
            anchor_of[p] = t;
        }
        let mut used = vec![false; target.atom_count()];
        for &f in forbidden {
            used[f] = true;
        }

        // Anchors first, then breadth-first growth so that every later atom
        // has an already-placed neighbor whenever the pattern allows it.
        let mut order = Vec::with_capacity(np);
        let mut placed = vec![false; np];
        let mut seeds: Vec<usize> = anchors.iter().map(|&(p, _)| p).collect();
        let mut rest: Vec<usize> = (0..np).collect();
        rest.sort_by_key(|&p| std::cmp::Reverse(pattern.degree(p)));
        seeds.extend(rest);
        for seed in seeds {
            if placed[seed] {
                continue;
            }
            placed[seed] = true;
            order.push(seed);
            let mut head = order.len() - 1;
            while head < order.len() {
                let u = order[head];
                head += 1;
                for &(v, _) in pattern.neighbors(u) {
                    if !placed[v] {
                        placed[v] = true;
                        order.push(v);
                    }
                }
            }
        }

        Search {
            pattern,
            target,
            wildcard,
            exact_degree,
            order,
            anchor_of,
            mapping: vec![UNMAPPED; np],
            used,
        }
    }

    fn atom_ok(&self, p: usize, t: usize) -> bool {
        let pa = self.pattern.atom(p);
        let ta = self.target.atom(t);
        let degree_ok = if self.exact_degree {
            self.pattern.degree(p) == self.target.degree(t)
        } else {
            self.pattern.degree(p) <= self.target.degree(t)
        };
        if !degree_ok {
            return false;
        }
        if self.wildcard == Some(pa.element) {
            return true;
        }
        pa.element == ta.element && pa.aromatic == ta.aromatic && pa.formal_charge == ta.formal_charge
    }

    fn bonds_ok(&self, p: usize, t: usize) -> bool {
        self.pattern.neighbors(p).iter().all(|&(pn, pb)| {
            let tn = self.mapping[pn];
            if tn == UNMAPPED {
                return true;
            }
            match self.target.bond_between(t, tn) {
                Some(tb) => self.target.bond(tb).order == self.pattern.bond(pb).order,
                None => false,
            }
        })
    }

    fn run(&mut self, visit: &mut dyn FnMut(&[usize]) -> bool) {
        if self.pattern.atom_count() == 0 {
            return;
        }
        self.extend(0, visit);
    }

    /// Returns false when the visitor asked to stop.
    fn extend(&mut self, depth: usize, visit: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        if depth == self.order.len() {
            return visit(&self.mapping);
        }
        let p = self.order[depth];
        let candidates: Vec<usize> = if self.anchor_of[p] != UNMAPPED {
            vec![self.anchor_of[p]]
        } else if let Some(&(pn, _)) = self
            .pattern
            .neighbors(p)
            .iter()
            .find(|&&(pn, _)| self.mapping[pn] != UNMAPPED)
        {
            self.target.neighbors(self.mapping[pn]).iter().map(|&(t, _)| t).collect()
        } else {
            (0..self.target.atom_count()).collect()
        };
        for t in candidates {
            if self.used[t] || !self.atom_ok(p, t) || !self.bonds_ok(p, t) {
                continue;
            }
            self.mapping[p] = t;
            self.used[t] = true;
            let keep_going = self.extend(depth + 1, visit);
            self.mapping[p] = UNMAPPED;
            self.used[t] = false;
            if !keep_going {
                return false;
            }
        }
        true
    }
}
