//! Encoding molecules as SAFE strings and back.

use std::cmp::Reverse;
use std::collections::HashMap;
use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::chem::{
    canonical_ranks_marked, max_ring_digit, parse_smiles, parse_smiles_with, write_smiles, Atom, Bond, BondOrder,
    ChemError, MolecularGraph, ParseOptions, ParsedSmiles,
};
use crate::fragment::{
    detect_cut_bonds, fallback_cut_bonds, AttachmentPoint, BondCutRule, Fragment, FragmentError, DEFAULT_RESOLUTION,
};

use super::error::CodecError;
use super::layout::{render_blocks, split_blocks};

const MAX_LABEL: u16 = 99;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SafeString {
    pub text: String,
    /// Byte range of each dot-separated block.
    pub fragment_spans: Vec<(usize, usize)>,
    /// Labels joining different blocks, in order of first appearance.
    pub attachment_digits: Vec<u16>,
}

impl SafeString {
    /// Wraps existing SAFE (or prefix) text, recovering its block spans and
    /// inter-block labels.
    pub fn from_text(text: &str) -> Result<SafeString, CodecError> {
        let parsed = parse_smiles_with(text, ParseOptions::prefix())?;
        let mut labels: Vec<u16> = parsed
            .ring_bonds
            .iter()
            .filter(|&&(bi, _)| {
                let b = parsed.graph.bond(bi);
                parsed.atom_block[b.a] != parsed.atom_block[b.b]
            })
            .map(|&(_, label)| label)
            .chain(parsed.open_rings.iter().map(|r| r.label))
            .collect();
        labels.sort_unstable();
        labels.dedup();
        // order by first appearance in the text
        let mut order: Vec<(usize, u16)> = labels
            .into_iter()
            .map(|l| (label_position(text, l).unwrap_or(usize::MAX), l))
            .collect();
        order.sort_unstable();
        Ok(SafeString {
            text: text.to_string(),
            fragment_spans: split_blocks(text),
            attachment_digits: order.into_iter().map(|(_, l)| l).collect(),
        })
    }

    fn from_blocks(blocks: Vec<String>, attachment_digits: Vec<u16>) -> SafeString {
        let text = blocks.join(".");
        SafeString {
            fragment_spans: split_blocks(&text),
            text,
            attachment_digits,
        }
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }

    pub fn blocks(&self) -> impl Iterator<Item = &str> {
        self.fragment_spans.iter().map(|&(s, e)| &self.text[s..e])
    }
}

impl fmt::Display for SafeString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

/// Byte offset of the first occurrence of ring label `label` outside
/// bracket atoms.
fn label_position(text: &str, label: u16) -> Option<usize> {
    let bytes = text.as_bytes();
    let mut i = 0;
    let mut in_bracket = false;
    while i < bytes.len() {
        match bytes[i] {
            b'[' => in_bracket = true,
            b']' => in_bracket = false,
            b'%' if !in_bracket
                && i + 2 < bytes.len()
                && bytes[i + 1].is_ascii_digit()
                && bytes[i + 2].is_ascii_digit() =>
            {
                let value = u16::from(bytes[i + 1] - b'0') * 10 + u16::from(bytes[i + 2] - b'0');
                if value == label {
                    return Some(i);
                }
                i += 2;
            }
            d @ b'0'..=b'9' if !in_bracket && u16::from(d - b'0') == label => return Some(i),
            _ => {}
        }
        i += 1;
    }
    None
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CutSource {
    Rules,
    Louvain,
    None,
}

impl CutSource {
    pub fn as_str(self) -> &'static str {
        match self {
            CutSource::Rules => "rules",
            CutSource::Louvain => "louvain",
            CutSource::None => "none",
        }
    }
}

impl fmt::Display for CutSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncodeReport {
    pub n_fragments: usize,
    pub max_original_ring_digit: u16,
    pub first_attachment_digit: u16,
    pub cut_rule_source: CutSource,
}

/// Rule cuts for every component; components without any rule cut fall
/// back to community-based cuts.
fn choose_cuts(mol: &MolecularGraph, rules: &[BondCutRule]) -> (Vec<usize>, CutSource) {
    let mut cuts = detect_cut_bonds(mol, rules);
    let component_of = mol.component_of();
    let mut has_rule_cut = vec![false; mol.components().len()];
    for &bi in &cuts {
        has_rule_cut[component_of[mol.bond(bi).a]] = true;
    }
    let mut fallback = false;
    for (c, members) in mol.components().iter().enumerate() {
        if has_rule_cut[c] || members.len() < 2 {
            continue;
        }
        let (sub, origin) = mol.subgraph(members);
        let extra = fallback_cut_bonds(&sub, DEFAULT_RESOLUTION);
        fallback |= !extra.is_empty();
        cuts.extend(extra.into_iter().map(|bi| origin[bi]));
    }
    cuts.sort_unstable();
    let source = if fallback {
        CutSource::Louvain
    } else if cuts.is_empty() {
        CutSource::None
    } else {
        CutSource::Rules
    };
    (cuts, source)
}

/// Converts a molecule to SAFE: cut bonds come from `rules` (or the
/// community fallback), fragments are ordered by decreasing heavy-atom
/// count and each cut becomes a ring-closure label numbered from one past
/// the highest ring digit of the molecule's canonical SMILES.
///
/// With `canonical` set, equal-size fragments are ordered by their
/// canonical SMILES and every block starts at its lowest-ranked attachment
/// atom, so the output depends only on the molecule.
pub fn encode_safe(
    mol: &MolecularGraph,
    rules: &[BondCutRule],
    canonical: bool,
) -> Result<(SafeString, EncodeReport), CodecError> {
    let (cuts, source) = choose_cuts(mol, rules);
    let (safe, mut report) = encode_with_cuts(mol, &cuts, canonical)?;
    report.cut_rule_source = source;
    Ok((safe, report))
}

/// SAFE encoding with an explicit set of cut bonds.
pub fn encode_with_cuts(
    mol: &MolecularGraph,
    cuts: &[usize],
    canonical: bool,
) -> Result<(SafeString, EncodeReport), CodecError> {
    let max_digit = max_ring_digit(&write_smiles(mol, true, None));
    let mut cut = vec![false; mol.bond_count()];
    for &bi in cuts {
        if bi >= mol.bond_count() {
            return Err(FragmentError::InvalidBondIndex { bond: bi }.into());
        }
        let bond = mol.bond(bi);
        if bond.in_ring {
            return Err(FragmentError::RingBondCut { bond: bi }.into());
        }
        if bond.order != BondOrder::Single {
            return Err(CodecError::UnsupportedCutOrder { bond: bi });
        }
        cut[bi] = true;
    }
    let n_cuts = cut.iter().filter(|&&c| c).count();
    let first = max_digit + 1;
    if usize::from(max_digit) + n_cuts > usize::from(MAX_LABEL) {
        return Err(CodecError::TooManyLabels {
            needed: usize::from(max_digit) + n_cuts,
        });
    }

    let priority: Vec<usize> = if canonical {
        canonical_ranks_marked(mol, &cut)
    } else {
        (0..mol.atom_count()).collect()
    };
    let mut plans = block_plans(mol, &cut, &priority);
    if canonical {
        for plan in &mut plans {
            plan.key = fragment_key(mol, &cut, &plan.atoms);
        }
        plans.sort_by(|a, b| {
            (Reverse(a.heavy), &a.key, a.min_priority).cmp(&(Reverse(b.heavy), &b.key, b.min_priority))
        });
    } else {
        plans.sort_by_key(|p| Reverse(p.heavy));
    }

    let roots: Vec<usize> = plans.iter().map(|p| p.root).collect();
    let mut next = first;
    let rendered = render_blocks(
        mol,
        &priority,
        &cut,
        &roots,
        first..first + n_cuts as u16,
        &mut |_| {
            next += 1;
            Ok(next - 1)
        },
    )?;
    let report = EncodeReport {
        n_fragments: plans.len(),
        max_original_ring_digit: max_digit,
        first_attachment_digit: first,
        cut_rule_source: if n_cuts == 0 { CutSource::None } else { CutSource::Rules },
    };
    Ok((SafeString::from_blocks(rendered.blocks, rendered.labels), report))
}

struct BlockPlan {
    atoms: Vec<usize>,
    root: usize,
    heavy: usize,
    min_priority: usize,
    key: String,
}

/// One plan per piece left after cutting, in order of first atom. The root
/// is the attachment atom with the lowest priority, or the lowest-priority
/// atom when the piece has no attachments.
fn block_plans(mol: &MolecularGraph, cut: &[bool], priority: &[usize]) -> Vec<BlockPlan> {
    crate::fragment::pieces(mol, cut)
        .into_iter()
        .map(|atoms| {
            let is_attachment = |a: usize| mol.neighbors(a).iter().any(|&(_, bi)| cut[bi]);
            let min_by_priority = |it: &mut dyn Iterator<Item = usize>| it.min_by_key(|&a| priority[a]);
            let root = min_by_priority(&mut atoms.iter().copied().filter(|&a| is_attachment(a)))
                .or_else(|| min_by_priority(&mut atoms.iter().copied()))
                .expect("pieces are non-empty");
            BlockPlan {
                heavy: atoms.iter().filter(|&&a| mol.atom(a).is_heavy()).count(),
                min_priority: atoms.iter().map(|&a| priority[a]).min().unwrap_or(0),
                root,
                atoms,
                key: String::new(),
            }
        })
        .collect()
}

/// Canonical SMILES of a piece with a `*` on every cut bond.
fn fragment_key(mol: &MolecularGraph, cut: &[bool], atoms: &[usize]) -> String {
    let (sub, _) = mol.subgraph(atoms);
    let (mut new_atoms, mut new_bonds) = sub.into_parts();
    for (local, &a) in atoms.iter().enumerate() {
        for &(_, bi) in mol.neighbors(a) {
            if cut[bi] {
                new_atoms.push(Atom::wildcard());
                new_bonds.push(Bond::new(local, new_atoms.len() - 1, mol.bond(bi).order));
            }
        }
    }
    let graph = MolecularGraph::new(new_atoms, new_bonds).expect("capped piece is a valid graph");
    write_smiles(&graph, true, None)
}

fn map_open(err: ChemError) -> CodecError {
    match err {
        ChemError::UnmatchedRingDigit { label, .. } => CodecError::OpenAttachment { label },
        other => CodecError::Chem(other),
    }
}

/// Parses SAFE text, which is plain SMILES; an unclosed label is reported
/// as an open attachment.
pub fn decode_safe(text: &str) -> Result<MolecularGraph, CodecError> {
    parse_smiles(text).map_err(map_open)
}

fn parse_complete(text: &str) -> Result<ParsedSmiles, CodecError> {
    parse_smiles_with(text, ParseOptions::default()).map_err(map_open)
}

/// Acyclic bonds written as labels between different blocks.
fn inter_block_cuts(parsed: &ParsedSmiles) -> Vec<usize> {
    parsed
        .ring_bonds
        .iter()
        .map(|&(bi, _)| bi)
        .filter(|&bi| {
            let b = parsed.graph.bond(bi);
            !b.in_ring && parsed.atom_block[b.a] != parsed.atom_block[b.b]
        })
        .collect()
}

/// Normal form of a SAFE string: same molecule and same cuts, with blocks,
/// roots and labels chosen canonically.
pub fn canonical_safe(text: &str) -> Result<SafeString, CodecError> {
    let parsed = parse_complete(text)?;
    let cuts = inter_block_cuts(&parsed);
    Ok(encode_with_cuts(&parsed.graph, &cuts, true)?.0)
}

/// Shuffles the fragment blocks with a seeded generator, keeping their
/// labels. With `reroot`, every block is also rewritten from a random atom
/// with a random neighbor order.
pub fn randomize_safe(text: &str, seed: u64, reroot: bool) -> Result<SafeString, CodecError> {
    let parsed = parse_complete(text)?;
    let mol = &parsed.graph;
    let cuts = inter_block_cuts(&parsed);
    let mut cut = vec![false; mol.bond_count()];
    for &bi in &cuts {
        cut[bi] = true;
    }
    let label_of: HashMap<usize, u16> = parsed.ring_bonds.iter().copied().collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pieces = crate::fragment::pieces(mol, &cut);
    pieces.shuffle(&mut rng);
    let priority: Vec<usize> = if reroot {
        let mut p: Vec<usize> = (0..mol.atom_count()).collect();
        p.shuffle(&mut rng);
        p
    } else {
        (0..mol.atom_count()).collect()
    };
    let roots: Vec<usize> = pieces
        .iter()
        .map(|atoms| {
            if reroot {
                *atoms.choose(&mut rng).expect("pieces are non-empty")
            } else {
                atoms[0]
            }
        })
        .collect();

    let used: Vec<u16> = cuts.iter().map(|bi| label_of[bi]).collect();
    let reserved = match (used.iter().min(), used.iter().max()) {
        (Some(&lo), Some(&hi)) => lo..hi + 1,
        _ => 0..0,
    };
    let rendered = render_blocks(mol, &priority, &cut, &roots, reserved, &mut |bi| Ok(label_of[&bi]))?;
    Ok(SafeString::from_blocks(rendered.blocks, rendered.labels))
}

/// One fragment per block. Labels left open within a block (closed in
/// another block, or not at all in a prefix) become attachment points.
pub fn list_fragments(text: &str) -> Result<Vec<Fragment>, CodecError> {
    let mut fragments = Vec::new();
    for (index, (start, end)) in split_blocks(text).into_iter().enumerate() {
        let block = &text[start..end];
        let parsed = parse_smiles_with(block, ParseOptions::prefix()).map_err(|source| CodecError::Block { index, source })?;
        let attachments = parsed
            .open_rings
            .iter()
            .map(|r| AttachmentPoint {
                fragment_atom: r.atom,
                label: r.label,
                cut_bond_order: r.order.unwrap_or(BondOrder::Single),
            })
            .collect();
        fragments.push(Fragment::new(parsed.graph, attachments, Vec::new()));
    }
    Ok(fragments)
}
