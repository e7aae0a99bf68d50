//! Radius-limited circular fingerprints and Tanimoto similarity.

use super::error::ChemError;
use super::graph::MolecularGraph;

pub const DEFAULT_WIDTH: usize = 2048;
pub const DEFAULT_RADIUS: u32 = 2;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Fingerprint {
    words: Vec<u64>,
    width: usize,
    radius: u32,
}

impl Fingerprint {
    pub fn empty(width: usize, radius: u32) -> Result<Self, ChemError> {
        if !width.is_power_of_two() {
            return Err(ChemError::InvalidWidth(width));
        }
        Ok(Fingerprint {
            words: vec![0; width.div_ceil(64)],
            width,
            radius,
        })
    }

    /// Builds a fingerprint with the given bits set.
    pub fn from_bits(width: usize, bits: impl IntoIterator<Item = usize>) -> Result<Self, ChemError> {
        let mut fp = Fingerprint::empty(width, DEFAULT_RADIUS)?;
        for b in bits {
            fp.set(b % width);
        }
        Ok(fp)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn set(&mut self, bit: usize) {
        self.words[bit / 64] |= 1 << (bit % 64);
    }

    pub fn get(&self, bit: usize) -> bool {
        self.words[bit / 64] >> (bit % 64) & 1 == 1
    }

    pub fn count_ones(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    pub fn on_bits(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.width).filter(|&b| self.get(b))
    }
}

fn fnv1a(words: &[i64]) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut hash = OFFSET;
    for w in words {
        for byte in w.to_le_bytes() {
            hash ^= u64::from(byte);
            hash = hash.wrapping_mul(PRIME);
        }
    }
    hash
}

/// Radius-2, 2048-bit circular fingerprint.
pub fn circular_fingerprint(mol: &MolecularGraph) -> Fingerprint {
    circular_fingerprint_with(mol, DEFAULT_WIDTH, DEFAULT_RADIUS).expect("default width is a power of two")
}

/// Circular fingerprint over heavy atoms: each atom starts from a hash of
/// its local invariant, and each iteration rehashes it together with the
/// sorted (bond order, neighbor identifier) list. Every identifier sets
/// bit `hash % width`.
pub fn circular_fingerprint_with(mol: &MolecularGraph, width: usize, radius: u32) -> Result<Fingerprint, ChemError> {
    let mut fp = Fingerprint::empty(width, radius)?;
    let centers: Vec<usize> = (0..mol.atom_count())
        .filter(|&i| !mol.atom(i).element.is_hydrogen())
        .collect();
    let heavy_neighbors = |i: usize| {
        mol.neighbors(i)
            .iter()
            .filter(|&&(nb, _)| !mol.atom(nb).element.is_hydrogen())
            .copied()
            .collect::<Vec<_>>()
    };

    let mut ids = vec![0u64; mol.atom_count()];
    for &i in &centers {
        let a = mol.atom(i);
        ids[i] = fnv1a(&[
            0,
            i64::from(a.element.atomic_number()),
            i64::from(a.formal_charge),
            heavy_neighbors(i).len() as i64,
            i64::from(a.aromatic),
            i64::from(mol.atom_in_ring(i)),
            i64::from(mol.total_hydrogens(i)),
            i64::from(a.isotope.unwrap_or(0)),
        ]);
        fp.set((ids[i] % width as u64) as usize);
    }
    for r in 1..=radius {
        let mut next = ids.clone();
        for &i in &centers {
            let nbs = heavy_neighbors(i);
            if nbs.is_empty() {
                continue;
            }
            let mut env: Vec<(i64, i64)> = nbs
                .iter()
                .map(|&(nb, bi)| (i64::from(mol.bond(bi).order.code()), ids[nb] as i64))
                .collect();
            env.sort_unstable();
            let mut words = vec![i64::from(r), ids[i] as i64];
            for (order, id) in env {
                words.push(order);
                words.push(id);
            }
            next[i] = fnv1a(&words);
            fp.set((next[i] % width as u64) as usize);
        }
        ids = next;
    }
    Ok(fp)
}

/// |a ∧ b| / |a ∨ b|; 1.0 when both are empty.
pub fn tanimoto(a: &Fingerprint, b: &Fingerprint) -> Result<f64, ChemError> {
    if a.width != b.width {
        return Err(ChemError::WidthMismatch(a.width, b.width));
    }
    let (mut both, mut either) = (0u32, 0u32);
    for (x, y) in a.words.iter().zip(&b.words) {
        both += (x & y).count_ones();
        either += (x | y).count_ones();
    }
    if either == 0 {
        return Ok(1.0);
    }
    Ok(f64::from(both) / f64::from(either))
}
