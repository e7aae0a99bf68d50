//! SMILES writer. The depth-first traversal is shared with the SAFE
//! encoder, which writes fragment blocks whose cut bonds surface as
//! attachment placeholders instead of being traversed.

use std::collections::BTreeSet;
use std::ops::Range;

use super::canon::canonical_ranks;
use super::graph::{Atom, BondOrder, MolecularGraph};

/// Writes `mol` as SMILES. With `canonical` set, the traversal follows
/// canonical ranks and components are emitted in sorted order, so every
/// atom ordering of the same graph yields the same string. `root` forces
/// the traversal to start at that atom (its component is written first).
pub fn write_smiles(mol: &MolecularGraph, canonical: bool, root: Option<usize>) -> String {
    if mol.is_empty() {
        return String::new();
    }
    let priority: Vec<usize> = if canonical {
        canonical_ranks(mol)
    } else {
        (0..mol.atom_count()).collect()
    };
    let no_cuts = vec![false; mol.bond_count()];
    let writer = BlockWriter::new(mol, &priority, &no_cuts, 0..0);

    let mut pieces: Vec<(bool, String)> = Vec::with_capacity(mol.components().len());
    for comp in mol.components() {
        let (start, forced) = match root {
            Some(r) if comp.contains(&r) => (r, true),
            _ => {
                let start = *comp.iter().min_by_key(|&&a| priority[a]).expect("component is non-empty");
                (start, false)
            }
        };
        let text = render_plain(&writer.write(start));
        pieces.push((forced, text));
    }
    if canonical {
        pieces.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.cmp(&b.1)));
    } else {
        pieces.sort_by(|a, b| b.0.cmp(&a.0));
    }
    pieces.into_iter().map(|(_, s)| s).collect::<Vec<_>>().join(".")
}

/// Highest ring-closure label used in a SMILES string (0 when none).
pub fn max_ring_digit(smiles: &str) -> u16 {
    let bytes = smiles.as_bytes();
    let mut max = 0;
    let mut i = 0;
    let mut in_bracket = false;
    while i < bytes.len() {
        match bytes[i] {
            b'[' => in_bracket = true,
            b']' => in_bracket = false,
            b'%' if !in_bracket && i + 2 < bytes.len() => {
                let (d1, d2) = (bytes[i + 1], bytes[i + 2]);
                if d1.is_ascii_digit() && d2.is_ascii_digit() {
                    max = max.max(u16::from(d1 - b'0') * 10 + u16::from(d2 - b'0'));
                    i += 2;
                }
            }
            d @ b'0'..=b'9' if !in_bracket => max = max.max(u16::from(d - b'0')),
            _ => {}
        }
        i += 1;
    }
    max
}

pub(crate) fn render_label(label: u16) -> String {
    if label < 10 {
        label.to_string()
    } else {
        format!("%{label:02}")
    }
}

pub(crate) fn atom_text(atom: &Atom) -> String {
    if let Some(raw) = &atom.bracket_raw {
        return raw.clone();
    }
    let symbol = if atom.aromatic {
        atom.element.symbol().to_ascii_lowercase()
    } else {
        atom.element.symbol().to_string()
    };
    if atom.is_bare() {
        return symbol;
    }
    let mut out = String::from("[");
    if let Some(iso) = atom.isotope {
        out.push_str(&iso.to_string());
    }
    out.push_str(&symbol);
    match atom.explicit_h.unwrap_or(0) {
        0 => {}
        1 => out.push('H'),
        h => {
            out.push('H');
            out.push_str(&h.to_string());
        }
    }
    match atom.formal_charge {
        0 => {}
        1 => out.push('+'),
        -1 => out.push('-'),
        c if c > 0 => out.push_str(&format!("+{c}")),
        c => out.push_str(&format!("-{}", -c)),
    }
    out.push(']');
    out
}

/// Bond symbol needed when writing bond `bi` from atom `from`; empty when
/// the reader would infer the same bond.
pub(crate) fn bond_symbol(mol: &MolecularGraph, bi: usize, from: usize) -> String {
    let bond = mol.bond(bi);
    if let Some(dir) = bond.direction {
        let d = if bond.a == from { dir } else { dir.flipped() };
        return d.symbol().to_string();
    }
    let both_aromatic = mol.atom(bond.a).aromatic && mol.atom(bond.b).aromatic;
    match bond.order {
        BondOrder::Single if both_aromatic && bond.in_ring => "-".into(),
        BondOrder::Single => String::new(),
        BondOrder::Double => "=".into(),
        BondOrder::Triple => "#".into(),
        BondOrder::Aromatic if bond.in_ring => String::new(),
        BondOrder::Aromatic => ":".into(),
    }
}

/// Output of a block traversal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Piece {
    Text(String),
    /// A cut bond leaving the block; rendered as a label by the caller.
    Attachment { bond: usize, symbol: String },
}

/// Renders pieces that contain no attachments.
fn render_plain(pieces: &[Piece]) -> String {
    pieces
        .iter()
        .map(|p| match p {
            Piece::Text(t) => t.as_str(),
            Piece::Attachment { .. } => unreachable!("plain SMILES has no cut bonds"),
        })
        .collect()
}

/// Depth-first writer over the atoms reachable from a root without
/// crossing cut bonds.
pub(crate) struct BlockWriter<'a> {
    mol: &'a MolecularGraph,
    priority: &'a [usize],
    cut: &'a [bool],
    reserved: Range<u16>,
}

impl<'a> BlockWriter<'a> {
    /// `priority`: lower values are visited first. `cut`: per bond, whether
    /// it is written as an attachment. `reserved`: labels internal ring
    /// closures must avoid.
    pub(crate) fn new(mol: &'a MolecularGraph, priority: &'a [usize], cut: &'a [bool], reserved: Range<u16>) -> Self {
        BlockWriter {
            mol,
            priority,
            cut,
            reserved,
        }
    }

    pub(crate) fn write(&self, root: usize) -> Vec<Piece> {
        let mol = self.mol;
        let n = mol.atom_count();
        let mut preorder_pos = vec![usize::MAX; n];
        let mut parent_bond: Vec<Option<usize>> = vec![None; n];
        let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut ring_bonds: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut seen_bond = vec![false; mol.bond_count()];

        let sorted_neighbors = |u: usize| -> Vec<(usize, usize)> {
            let mut nbs: Vec<(usize, usize)> = mol
                .neighbors(u)
                .iter()
                .copied()
                .filter(|&(_, bi)| !self.cut[bi])
                .collect();
            nbs.sort_by_key(|&(v, _)| self.priority[v]);
            nbs
        };

        let mut visit_count = 0;
        preorder_pos[root] = visit_count;
        visit_count += 1;
        let mut stack: Vec<(usize, Vec<(usize, usize)>, usize)> = vec![(root, sorted_neighbors(root), 0)];
        while let Some(top) = stack.len().checked_sub(1) {
            let pos = stack[top].2;
            if pos >= stack[top].1.len() {
                stack.pop();
                continue;
            }
            stack[top].2 += 1;
            let u = stack[top].0;
            let (v, bi) = stack[top].1[pos];
            if seen_bond[bi] {
                continue;
            }
            seen_bond[bi] = true;
            if preorder_pos[v] == usize::MAX {
                preorder_pos[v] = visit_count;
                visit_count += 1;
                parent_bond[v] = Some(bi);
                children[u].push(v);
                stack.push((v, sorted_neighbors(v), 0));
            } else {
                ring_bonds[u].push(bi);
                ring_bonds[v].push(bi);
            }
        }

        enum Task {
            Atom(usize),
            Text(&'static str),
        }
        let mut out = Vec::new();
        let mut text = String::new();
        let mut open_digits: BTreeSet<u16> = BTreeSet::new();
        let mut digit_of_bond: Vec<u16> = vec![0; mol.bond_count()];
        let mut emitted = vec![false; n];
        let mut tasks = vec![Task::Atom(root)];
        while let Some(task) = tasks.pop() {
            let u = match task {
                Task::Text(t) => {
                    text.push_str(t);
                    continue;
                }
                Task::Atom(u) => u,
            };
            if let Some(pb) = parent_bond[u] {
                text.push_str(&bond_symbol(mol, pb, mol.bond(pb).other(u)));
            }
            text.push_str(&atom_text(mol.atom(u)));
            emitted[u] = true;

            let mut closings: Vec<usize> = Vec::new();
            let mut openings: Vec<usize> = Vec::new();
            for &bi in &ring_bonds[u] {
                let other = mol.bond(bi).other(u);
                if emitted[other] && other != u {
                    closings.push(bi);
                } else {
                    openings.push(bi);
                }
            }
            closings.sort_by_key(|&bi| preorder_pos[mol.bond(bi).other(u)]);
            openings.sort_by_key(|&bi| preorder_pos[mol.bond(bi).other(u)]);
            let mut released = Vec::new();
            for bi in closings {
                let d = digit_of_bond[bi];
                text.push_str(&render_label(d));
                released.push(d);
            }
            for bi in openings {
                let d = (1..100u16)
                    .find(|d| !open_digits.contains(d) && !self.reserved.contains(d))
                    .expect("more than 99 simultaneously open ring closures");
                open_digits.insert(d);
                digit_of_bond[bi] = d;
                text.push_str(&bond_symbol(mol, bi, u));
                text.push_str(&render_label(d));
            }
            for d in released {
                open_digits.remove(&d);
            }

            let mut cuts: Vec<(usize, usize)> = mol
                .neighbors(u)
                .iter()
                .copied()
                .filter(|&(_, bi)| self.cut[bi])
                .collect();
            cuts.sort_by_key(|&(v, _)| self.priority[v]);
            for (_, bi) in cuts {
                if !text.is_empty() {
                    out.push(Piece::Text(std::mem::take(&mut text)));
                }
                out.push(Piece::Attachment {
                    bond: bi,
                    symbol: bond_symbol(mol, bi, u),
                });
            }

            let kids = &children[u];
            if let Some((&last, rest)) = kids.split_last() {
                tasks.push(Task::Atom(last));
                for &child in rest.iter().rev() {
                    tasks.push(Task::Text(")"));
                    tasks.push(Task::Atom(child));
                    tasks.push(Task::Text("("));
                }
            }
        }
        if !text.is_empty() {
            out.push(Piece::Text(text));
        }
        out
    }
}
