//! SMILES reader for the supported grammar subset: organic-subset and
//! bracket atoms, bond symbols `- = # : / \`, branches, ring closures
//! `1`-`9` and `%10`-`%99`, dots and the `*` wildcard.

use std::collections::{BTreeMap, HashSet};

use super::element::Element;
use super::error::ChemError;
use super::graph::{Atom, Bond, BondDirection, BondOrder, MolecularGraph};

/// Parser leniency. The strict default rejects unclosed ring labels, a
/// trailing dot and aromatic atoms outside rings; the prefix mode accepts
/// them so that partial SAFE strings can be inspected.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ParseOptions {
    pub allow_open_rings: bool,
}

impl ParseOptions {
    pub fn prefix() -> Self {
        ParseOptions { allow_open_rings: true }
    }
}

/// A ring-closure label still open at the end of the input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpenRing {
    pub label: u16,
    pub atom: usize,
    pub order: Option<BondOrder>,
    pub pos: usize,
}

/// Parse result carrying the dot-block layout alongside the graph.
#[derive(Clone, Debug)]
pub struct ParsedSmiles {
    pub graph: MolecularGraph,
    /// Dot-separated block index per atom.
    pub atom_block: Vec<usize>,
    /// Number of non-empty blocks.
    pub block_count: usize,
    /// `(bond index, label)` for every bond formed by a ring-closure label.
    pub ring_bonds: Vec<(usize, u16)>,
    /// Labels left open (prefix mode only), in order of appearance.
    pub open_rings: Vec<OpenRing>,
}

/// Parses a SMILES string in strict mode.
pub fn parse_smiles(text: &str) -> Result<MolecularGraph, ChemError> {
    parse_smiles_with(text, ParseOptions::default()).map(|p| p.graph)
}

pub fn parse_smiles_with(text: &str, options: ParseOptions) -> Result<ParsedSmiles, ChemError> {
    let text = text.trim();
    if text.is_empty() {
        return Err(ChemError::EmptyInput);
    }
    Parser::new(text, options).run()
}

struct PendingBond {
    order: BondOrder,
    direction: Option<BondDirection>,
}

struct RingOpening {
    atom: usize,
    bond: Option<PendingBond>,
    pos: usize,
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
    options: ParseOptions,
    atoms: Vec<Atom>,
    bonds: Vec<Bond>,
    /// Bonds whose order was implied between two aromatic atoms.
    implicit_aromatic: Vec<bool>,
    bonded: HashSet<(usize, usize)>,
    atom_block: Vec<usize>,
    block: usize,
    prev: Option<usize>,
    pending: Option<PendingBond>,
    pending_pos: usize,
    /// (branch parent, atom count when the branch opened, position)
    branches: Vec<(usize, usize, usize)>,
    rings: BTreeMap<u16, RingOpening>,
    ring_bonds: Vec<(usize, u16)>,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str, options: ParseOptions) -> Self {
        Parser {
            bytes: text.as_bytes(),
            pos: 0,
            options,
            atoms: Vec::new(),
            bonds: Vec::new(),
            implicit_aromatic: Vec::new(),
            bonded: HashSet::new(),
            atom_block: Vec::new(),
            block: 0,
            prev: None,
            pending: None,
            pending_pos: 0,
            branches: Vec::new(),
            rings: BTreeMap::new(),
            ring_bonds: Vec::new(),
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn peek_at(&self, offset: usize) -> Option<u8> {
        self.bytes.get(self.pos + offset).copied()
    }

    fn unexpected(&self, pos: usize) -> ChemError {
        let ch = std::str::from_utf8(&self.bytes[pos..])
            .ok()
            .and_then(|s| s.chars().next())
            .unwrap_or('\u{fffd}');
        ChemError::UnexpectedCharacter { ch, pos }
    }

    fn run(mut self) -> Result<ParsedSmiles, ChemError> {
        let mut trailing_dot = false;
        while let Some(c) = self.peek() {
            trailing_dot = false;
            match c {
                b'(' => {
                    let Some(prev) = self.prev else {
                        return Err(self.unexpected(self.pos));
                    };
                    if self.pending.is_some() {
                        return Err(self.unexpected(self.pos));
                    }
                    self.branches.push((prev, self.atoms.len(), self.pos));
                    self.pos += 1;
                }
                b')' => {
                    let Some((parent, count, _)) = self.branches.pop() else {
                        return Err(ChemError::UnbalancedParenthesis { pos: self.pos });
                    };
                    if self.pending.is_some() || self.atoms.len() == count {
                        return Err(self.unexpected(self.pos));
                    }
                    self.prev = Some(parent);
                    self.pos += 1;
                }
                b'.' => {
                    if self.prev.is_none() || self.pending.is_some() {
                        return Err(self.unexpected(self.pos));
                    }
                    if let Some(&(_, _, pos)) = self.branches.last() {
                        return Err(ChemError::UnbalancedParenthesis { pos });
                    }
                    self.prev = None;
                    self.block += 1;
                    self.pos += 1;
                    trailing_dot = true;
                }
                b'-' | b'=' | b'#' | b':' | b'/' | b'\\' => {
                    if self.prev.is_none() || self.pending.is_some() {
                        return Err(self.unexpected(self.pos));
                    }
                    let (order, direction) = match c {
                        b'-' => (BondOrder::Single, None),
                        b'=' => (BondOrder::Double, None),
                        b'#' => (BondOrder::Triple, None),
                        b':' => (BondOrder::Aromatic, None),
                        b'/' => (BondOrder::Single, Some(BondDirection::Up)),
                        _ => (BondOrder::Single, Some(BondDirection::Down)),
                    };
                    self.pending = Some(PendingBond { order, direction });
                    self.pending_pos = self.pos;
                    self.pos += 1;
                }
                b'0'..=b'9' | b'%' => {
                    let start = self.pos;
                    let label = self.ring_label()?;
                    let Some(atom) = self.prev else {
                        return Err(self.unexpected(start));
                    };
                    self.ring_closure(atom, label, start)?;
                }
                _ => {
                    let start = self.pos;
                    let atom = if c == b'[' { self.bracket_atom()? } else { self.bare_atom()? };
                    self.add_atom(atom, start)?;
                }
            }
        }

        if let Some(&(_, _, pos)) = self.branches.last() {
            return Err(ChemError::UnbalancedParenthesis { pos });
        }
        if self.pending.is_some() {
            return Err(ChemError::UnexpectedEnd);
        }
        if trailing_dot && !self.options.allow_open_rings {
            return Err(ChemError::UnexpectedEnd);
        }
        let mut open_rings: Vec<OpenRing> = self
            .rings
            .iter()
            .map(|(&label, o)| OpenRing {
                label,
                atom: o.atom,
                order: o.bond.as_ref().map(|b| b.order),
                pos: o.pos,
            })
            .collect();
        open_rings.sort_by_key(|o| o.pos);
        if !self.options.allow_open_rings {
            if let Some(first) = open_rings.first() {
                return Err(ChemError::UnmatchedRingDigit {
                    label: first.label,
                    pos: first.pos,
                });
            }
        }
        if self.atoms.is_empty() {
            return Err(ChemError::EmptyInput);
        }

        // Ring membership is known only once every bond exists; implied
        // aromatic bonds outside rings are single bonds between aromatic
        // systems.
        let probe = MolecularGraph::new(self.atoms.clone(), self.bonds.clone())?;
        let mut bonds = self.bonds;
        for (i, bond) in bonds.iter_mut().enumerate() {
            if self.implicit_aromatic[i] && !probe.bond(i).in_ring {
                bond.order = BondOrder::Single;
            }
        }
        let graph = MolecularGraph::new(self.atoms, bonds)?;
        graph.check_valence()?;
        if !self.options.allow_open_rings {
            graph.check_aromatic_rings()?;
        }
        let block_count = self.atom_block.last().map_or(0, |&b| b + 1);
        Ok(ParsedSmiles {
            graph,
            atom_block: self.atom_block,
            block_count,
            ring_bonds: self.ring_bonds,
            open_rings,
        })
    }

    fn ring_label(&mut self) -> Result<u16, ChemError> {
        let start = self.pos;
        match self.peek() {
            Some(b'%') => {
                let (Some(d1), Some(d2)) = (self.peek_at(1), self.peek_at(2)) else {
                    return Err(ChemError::UnexpectedEnd);
                };
                if !d1.is_ascii_digit() || !d2.is_ascii_digit() {
                    return Err(self.unexpected(start));
                }
                self.pos += 3;
                Ok(u16::from(d1 - b'0') * 10 + u16::from(d2 - b'0'))
            }
            Some(d) => {
                self.pos += 1;
                Ok(u16::from(d - b'0'))
            }
            None => Err(ChemError::UnexpectedEnd),
        }
    }

    fn implied_order(&self, a: usize, b: usize) -> (BondOrder, bool) {
        if self.atoms[a].aromatic && self.atoms[b].aromatic {
            (BondOrder::Aromatic, true)
        } else {
            (BondOrder::Single, false)
        }
    }

    fn push_bond(
        &mut self,
        a: usize,
        b: usize,
        explicit: Option<PendingBond>,
        on_dup: ChemError,
        pos: usize,
    ) -> Result<usize, ChemError> {
        if a == b || !self.bonded.insert((a.min(b), a.max(b))) {
            return Err(on_dup);
        }
        let (order, direction, implicit) = match explicit {
            Some(p) => {
                if p.order == BondOrder::Aromatic && !(self.atoms[a].aromatic && self.atoms[b].aromatic) {
                    return Err(ChemError::InvalidBond(format!(
                        "aromatic bond symbol at position {pos} joins a non-aromatic atom"
                    )));
                }
                (p.order, p.direction, false)
            }
            None => {
                let (order, implicit) = self.implied_order(a, b);
                (order, None, implicit)
            }
        };
        self.bonds.push(Bond {
            a,
            b,
            order,
            in_ring: false,
            direction,
        });
        self.implicit_aromatic.push(implicit);
        Ok(self.bonds.len() - 1)
    }

    fn ring_closure(&mut self, atom: usize, label: u16, pos: usize) -> Result<(), ChemError> {
        let bond_here = self.pending.take();
        match self.rings.remove(&label) {
            None => {
                self.rings.insert(
                    label,
                    RingOpening {
                        atom,
                        bond: bond_here,
                        pos,
                    },
                );
            }
            Some(open) => {
                let bond = match (open.bond, bond_here) {
                    (Some(a), Some(b)) => {
                        if a.order != b.order {
                            return Err(ChemError::ConflictingRingBond { label });
                        }
                        Some(a)
                    }
                    (Some(a), None) => Some(a),
                    (None, Some(b)) => Some(PendingBond {
                        order: b.order,
                        // written relative to the closing atom
                        direction: b.direction.map(BondDirection::flipped),
                    }),
                    (None, None) => None,
                };
                let bi = self.push_bond(open.atom, atom, bond, ChemError::DuplicateRingBond { label, pos }, pos)?;
                self.ring_bonds.push((bi, label));
            }
        }
        Ok(())
    }

    fn add_atom(&mut self, atom: Atom, pos: usize) -> Result<(), ChemError> {
        let idx = self.atoms.len();
        self.atoms.push(atom);
        self.atom_block.push(self.block);
        if let Some(prev) = self.prev {
            let pending = self.pending.take();
            let dup = ChemError::InvalidBond(format!("duplicate bond at position {pos}"));
            self.push_bond(prev, idx, pending, dup, self.pending_pos)?;
        }
        self.prev = Some(idx);
        Ok(())
    }

    fn bare_atom(&mut self) -> Result<Atom, ChemError> {
        let start = self.pos;
        let c = self.peek().ok_or(ChemError::UnexpectedEnd)?;
        let (element, aromatic, len) = match c {
            b'B' if self.peek_at(1) == Some(b'r') => (Element::BR, false, 2),
            b'C' if self.peek_at(1) == Some(b'l') => (Element::CL, false, 2),
            b'B' => (Element::B, false, 1),
            b'C' => (Element::C, false, 1),
            b'N' => (Element::N, false, 1),
            b'O' => (Element::O, false, 1),
            b'P' => (Element::P, false, 1),
            b'S' => (Element::S, false, 1),
            b'F' => (Element::F, false, 1),
            b'I' => (Element::I, false, 1),
            b'b' => (Element::B, true, 1),
            b'c' => (Element::C, true, 1),
            b'n' => (Element::N, true, 1),
            b'o' => (Element::O, true, 1),
            b'p' => (Element::P, true, 1),
            b's' => (Element::S, true, 1),
            b'*' => (Element::WILDCARD, false, 1),
            b'A'..=b'Z' | b'a'..=b'z' => {
                let end = self.bytes[start + 1..]
                    .iter()
                    .position(|b| !b.is_ascii_lowercase())
                    .map_or(self.bytes.len(), |p| start + 1 + p)
                    .min(start + 2);
                let symbol = String::from_utf8_lossy(&self.bytes[start..end]).into_owned();
                return Err(ChemError::UnknownElement { symbol, pos: start });
            }
            _ => return Err(self.unexpected(start)),
        };
        self.pos += len;
        Ok(Atom {
            aromatic,
            ..Atom::new(element)
        })
    }

    fn bracket_atom(&mut self) -> Result<Atom, ChemError> {
        let start = self.pos;
        let invalid = ChemError::InvalidBracketAtom { pos: start };
        self.pos += 1;

        let mut isotope: Option<u16> = None;
        while let Some(d @ b'0'..=b'9') = self.peek() {
            let value = u32::from(isotope.unwrap_or(0)) * 10 + u32::from(d - b'0');
            isotope = Some(u16::try_from(value).map_err(|_| invalid.clone())?);
            self.pos += 1;
        }

        let (element, aromatic) = self.bracket_symbol(start)?;

        let mut keep_raw = false;
        if self.peek() == Some(b'@') {
            keep_raw = true;
            self.pos += 1;
            if self.peek() == Some(b'@') {
                self.pos += 1;
            } else if let (Some(a), Some(b)) = (self.peek(), self.peek_at(1)) {
                let tag = [a, b];
                if matches!(&tag, b"TH" | b"AL" | b"SP" | b"TB" | b"OH") {
                    self.pos += 2;
                    while let Some(b'0'..=b'9') = self.peek() {
                        self.pos += 1;
                    }
                }
            }
        }

        let mut hcount = 0u8;
        if self.peek() == Some(b'H') {
            self.pos += 1;
            hcount = 1;
            if let Some(d @ b'0'..=b'9') = self.peek() {
                hcount = d - b'0';
                self.pos += 1;
            }
        }

        let mut charge: i32 = 0;
        if let Some(sign @ (b'+' | b'-')) = self.peek() {
            let unit = if sign == b'+' { 1 } else { -1 };
            self.pos += 1;
            let mut magnitude = 1;
            if let Some(d @ b'0'..=b'9') = self.peek() {
                magnitude = i32::from(d - b'0');
                self.pos += 1;
                if let Some(b'0'..=b'9') = self.peek() {
                    return Err(ChemError::ChargeOutOfRange(i8::MAX));
                }
            } else {
                while self.peek() == Some(sign) {
                    magnitude += 1;
                    self.pos += 1;
                }
            }
            charge = unit * magnitude;
        }
        if !(-4..=4).contains(&charge) {
            return Err(ChemError::ChargeOutOfRange(charge.clamp(-128, 127) as i8));
        }

        if self.peek() == Some(b':') {
            keep_raw = true;
            self.pos += 1;
            if !matches!(self.peek(), Some(b'0'..=b'9')) {
                return Err(invalid);
            }
            while let Some(b'0'..=b'9') = self.peek() {
                self.pos += 1;
            }
        }

        if self.peek() != Some(b']') {
            return Err(invalid);
        }
        self.pos += 1;
        let raw = String::from_utf8_lossy(&self.bytes[start..self.pos]).into_owned();
        Ok(Atom {
            element,
            aromatic,
            formal_charge: charge as i8,
            isotope,
            explicit_h: Some(hcount),
            bracket_raw: keep_raw.then_some(raw),
        })
    }

    fn bracket_symbol(&mut self, bracket_start: usize) -> Result<(Element, bool), ChemError> {
        let start = self.pos;
        let c = self.peek().ok_or(ChemError::UnexpectedEnd)?;
        if c == b'*' {
            self.pos += 1;
            return Ok((Element::WILDCARD, false));
        }
        if c.is_ascii_lowercase() {
            for sym in ["se", "as", "te"] {
                if self.bytes[start..].starts_with(sym.as_bytes()) {
                    self.pos += 2;
                    let el = Element::from_symbol(&capitalize(sym)).expect("known aromatic symbol");
                    return Ok((el, true));
                }
            }
            let el = match c {
                b'b' => Element::B,
                b'c' => Element::C,
                b'n' => Element::N,
                b'o' => Element::O,
                b'p' => Element::P,
                b's' => Element::S,
                _ => {
                    return Err(ChemError::UnknownElement {
                        symbol: (c as char).to_string(),
                        pos: start,
                    })
                }
            };
            self.pos += 1;
            return Ok((el, true));
        }
        if !c.is_ascii_uppercase() {
            return Err(ChemError::InvalidBracketAtom { pos: bracket_start });
        }
        if let Some(l @ b'a'..=b'z') = self.peek_at(1) {
            let two = format!("{}{}", c as char, l as char);
            if let Some(el) = Element::from_symbol(&two) {
                self.pos += 2;
                return Ok((el, false));
            }
        }
        let one = (c as char).to_string();
        match Element::from_symbol(&one) {
            Some(el) => {
                self.pos += 1;
                Ok((el, false))
            }
            None => Err(ChemError::UnknownElement { symbol: one, pos: start }),
        }
    }
}

fn capitalize(s: &str) -> String {
    let mut chars = s.chars();
    match chars.next() {
        Some(first) => first.to_ascii_uppercase().to_string() + chars.as_str(),
        None => String::new(),
    }
}
