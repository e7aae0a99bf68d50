//! Pattern-based bond cutting rules.
//!
//! A rule describes the two ends of a cuttable bond. Each side is a small
//! SMILES pattern whose first `*` stands for the atom across the bond; the
//! neighbor of that `*` is the marked atom sitting on the bond. Any other
//! `*` matches an arbitrary atom.

use std::path::Path;

use crate::chem::{has_anchored_match, parse_smiles_with, BondOrder, Element, MolecularGraph, ParseOptions};

use super::error::FragmentError;

/// BRICS-lite rule table: `name TAB left TAB right [TAB qualifiers]`.
pub const DEFAULT_RULES: &str = "\
# ring atom to chain atom
ring_chain\t**\t**\tleft_ring,right_chain
# amide C-N
amide\t*C=O\t*N
# N or O to a non-carbonyl carbon, both sides keeping two heavy atoms
amine_alkyl\t*N\t*C\tright_not_carbonyl,min_side=2
ether_alkyl\t*O\t*C\tright_not_carbonyl,min_side=2
# two ring systems joined directly
ring_ring\t**\t**\tleft_ring,right_ring
";

#[derive(Clone, Debug)]
pub struct RuleSide {
    pub pattern: MolecularGraph,
    /// Pattern atom standing for the partner across the cut bond.
    pub partner: usize,
    /// Pattern atom on the cut bond.
    pub marked: usize,
    /// Required ring membership of the marked atom, if any.
    pub ring: Option<bool>,
    /// The marked atom must not carry a C=O double bond.
    pub not_carbonyl: bool,
}

#[derive(Clone, Debug)]
pub struct BondCutRule {
    pub name: String,
    pub left: RuleSide,
    pub right: RuleSide,
    /// Minimum heavy atoms on each side of the cut.
    pub min_side: usize,
}

impl RuleSide {
    fn from_pattern(text: &str) -> Result<RuleSide, String> {
        let parsed = parse_smiles_with(text, ParseOptions::prefix()).map_err(|e| e.to_string())?;
        if !parsed.open_rings.is_empty() || parsed.block_count != 1 {
            return Err(format!("pattern '{text}' must be one closed fragment"));
        }
        let pattern = parsed.graph;
        let partner = (0..pattern.atom_count())
            .find(|&i| pattern.atom(i).is_wildcard())
            .ok_or_else(|| format!("pattern '{text}' has no '*' partner atom"))?;
        if pattern.degree(partner) != 1 {
            return Err(format!("partner '*' in '{text}' must have exactly one neighbor"));
        }
        let (marked, bond) = pattern.neighbors(partner)[0];
        if pattern.bond(bond).order != BondOrder::Single {
            return Err(format!("pattern '{text}' must join its partner by a single bond"));
        }
        Ok(RuleSide {
            pattern,
            partner,
            marked,
            ring: None,
            not_carbonyl: false,
        })
    }

    /// Whether this side matches with the marked atom on `atom` and the
    /// partner on `partner`.
    fn matches(&self, mol: &MolecularGraph, atom: usize, partner: usize) -> bool {
        if let Some(ring) = self.ring {
            if mol.atom_in_ring(atom) != ring {
                return false;
            }
        }
        if self.not_carbonyl && is_carbonyl(mol, atom) {
            return false;
        }
        has_anchored_match(
            &self.pattern,
            mol,
            Some(Element::WILDCARD),
            &[(self.marked, atom), (self.partner, partner)],
            &[],
        )
    }
}

fn is_carbonyl(mol: &MolecularGraph, atom: usize) -> bool {
    mol.neighbors(atom)
        .iter()
        .any(|&(nb, bi)| mol.bond(bi).order == BondOrder::Double && mol.atom(nb).element == Element::O)
}

impl BondCutRule {
    pub fn new(name: &str, left: &str, right: &str) -> Result<BondCutRule, String> {
        Ok(BondCutRule {
            name: name.to_string(),
            left: RuleSide::from_pattern(left)?,
            right: RuleSide::from_pattern(right)?,
            min_side: 1,
        })
    }

    /// Applies comma-separated qualifiers: `left_ring`, `left_chain`,
    /// `right_ring`, `right_chain`, `left_not_carbonyl`,
    /// `right_not_carbonyl`, `min_side=N`.
    pub fn with_qualifiers(mut self, qualifiers: &str) -> Result<BondCutRule, String> {
        for q in qualifiers.split(',').map(str::trim).filter(|q| !q.is_empty()) {
            match q {
                "left_ring" => self.left.ring = Some(true),
                "left_chain" => self.left.ring = Some(false),
                "right_ring" => self.right.ring = Some(true),
                "right_chain" => self.right.ring = Some(false),
                "left_not_carbonyl" => self.left.not_carbonyl = true,
                "right_not_carbonyl" => self.right.not_carbonyl = true,
                _ => {
                    let n = q
                        .strip_prefix("min_side=")
                        .and_then(|v| v.parse::<usize>().ok())
                        .ok_or_else(|| format!("unknown qualifier '{q}'"))?;
                    self.min_side = n.max(1);
                }
            }
        }
        Ok(self)
    }

    /// Whether the rule matches bond `bond` in either orientation, given the
    /// heavy-atom counts on each side of it.
    fn matches(&self, mol: &MolecularGraph, bond: usize, sides: (usize, usize)) -> bool {
        if sides.0 < self.min_side || sides.1 < self.min_side {
            return false;
        }
        let (a, b) = (mol.bond(bond).a, mol.bond(bond).b);
        (self.left.matches(mol, a, b) && self.right.matches(mol, b, a))
            || (self.left.matches(mol, b, a) && self.right.matches(mol, a, b))
    }
}

/// Parses a rule table. Blank lines and `#` comments are skipped.
pub fn parse_rules(text: &str) -> Result<Vec<BondCutRule>, FragmentError> {
    let mut rules = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let syntax = |message: String| FragmentError::RuleSyntax { line: k + 1, message };
        if !(3..=4).contains(&fields.len()) {
            return Err(syntax(format!("expected 3 or 4 tab-separated fields, found {}", fields.len())));
        }
        let mut rule = BondCutRule::new(fields[0], fields[1], fields[2]).map_err(syntax)?;
        if let Some(q) = fields.get(3) {
            rule = rule.with_qualifiers(q).map_err(syntax)?;
        }
        rules.push(rule);
    }
    Ok(rules)
}

pub fn load_rules(path: impl AsRef<Path>) -> Result<Vec<BondCutRule>, FragmentError> {
    let text = std::fs::read_to_string(path).map_err(|e| FragmentError::Io(e.to_string()))?;
    parse_rules(&text)
}

pub fn default_rules() -> Vec<BondCutRule> {
    parse_rules(DEFAULT_RULES).expect("built-in rules parse")
}

/// Heavy atoms on `atom`'s side once bond `bond` is removed.
pub(crate) fn side_heavy_count(mol: &MolecularGraph, bond: usize, atom: usize) -> usize {
    let mut seen = vec![false; mol.atom_count()];
    seen[atom] = true;
    let mut stack = vec![atom];
    let mut count = 0;
    while let Some(u) = stack.pop() {
        if mol.atom(u).is_heavy() {
            count += 1;
        }
        for &(v, bi) in mol.neighbors(u) {
            if bi != bond && !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    count
}

/// Whether a bond may be cut at all: single, acyclic, between two atoms
/// that are neither hydrogen nor wildcard.
pub(crate) fn is_cuttable(mol: &MolecularGraph, bond: usize) -> bool {
    let b = mol.bond(bond);
    b.order == BondOrder::Single && !b.in_ring && mol.atom(b.a).is_heavy() && mol.atom(b.b).is_heavy()
}

/// Bonds matched by at least one rule, ascending and deduplicated.
pub fn detect_cut_bonds(mol: &MolecularGraph, rules: &[BondCutRule]) -> Vec<usize> {
    (0..mol.bond_count())
        .filter(|&bi| is_cuttable(mol, bi))
        .filter(|&bi| {
            let b = mol.bond(bi);
            let sides = (side_heavy_count(mol, bi, b.a), side_heavy_count(mol, bi, b.b));
            rules.iter().any(|r| r.matches(mol, bi, sides))
        })
        .collect()
}
