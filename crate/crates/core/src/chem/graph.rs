use super::element::Element;
use super::error::ChemError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BondOrder {
    Single,
    Double,
    Triple,
    Aromatic,
}

impl BondOrder {
    /// Contribution to the valence sum. Aromatic bonds count as one; the
    /// delocalized contribution is handled per atom.
    pub fn valence(self) -> u8 {
        match self {
            BondOrder::Single | BondOrder::Aromatic => 1,
            BondOrder::Double => 2,
            BondOrder::Triple => 3,
        }
    }

    pub(crate) fn code(self) -> u8 {
        match self {
            BondOrder::Single => 1,
            BondOrder::Double => 2,
            BondOrder::Triple => 3,
            BondOrder::Aromatic => 4,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            BondOrder::Single => "-",
            BondOrder::Double => "=",
            BondOrder::Triple => "#",
            BondOrder::Aromatic => ":",
        }
    }
}

/// Directional single-bond marker (`/` or `\`), stored relative to the
/// bond's `a -> b` direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BondDirection {
    Up,
    Down,
}

impl BondDirection {
    pub fn flipped(self) -> Self {
        match self {
            BondDirection::Up => BondDirection::Down,
            BondDirection::Down => BondDirection::Up,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            BondDirection::Up => '/',
            BondDirection::Down => '\\',
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Atom {
    pub element: Element,
    pub aromatic: bool,
    pub formal_charge: i8,
    pub isotope: Option<u16>,
    /// Hydrogen count written inside brackets. `None` for bare atoms, whose
    /// hydrogens are implied by the valence table.
    pub explicit_h: Option<u8>,
    /// Verbatim bracket text for atoms carrying information the graph does
    /// not model (chirality, atom classes).
    pub bracket_raw: Option<String>,
}

impl Atom {
    pub fn new(element: Element) -> Self {
        Atom {
            element,
            aromatic: false,
            formal_charge: 0,
            isotope: None,
            explicit_h: None,
            bracket_raw: None,
        }
    }

    pub fn aromatic(element: Element) -> Self {
        Atom {
            aromatic: true,
            ..Atom::new(element)
        }
    }

    pub fn wildcard() -> Self {
        Atom::new(Element::WILDCARD)
    }

    pub fn is_wildcard(&self) -> bool {
        self.element.is_wildcard()
    }

    pub fn is_heavy(&self) -> bool {
        self.element.is_heavy()
    }

    /// Whether the atom can be written without brackets.
    pub fn is_bare(&self) -> bool {
        self.element.is_organic_subset()
            && self.formal_charge == 0
            && self.isotope.is_none()
            && self.explicit_h.is_none()
            && self.bracket_raw.is_none()
            && (!self.aromatic || matches!(self.element.atomic_number(), 0 | 5 | 6 | 7 | 8 | 15 | 16))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Bond {
    pub a: usize,
    pub b: usize,
    pub order: BondOrder,
    /// Computed by [`MolecularGraph::new`]; any caller-provided value is
    /// overwritten.
    pub in_ring: bool,
    pub direction: Option<BondDirection>,
}

impl Bond {
    pub fn new(a: usize, b: usize, order: BondOrder) -> Self {
        Bond {
            a,
            b,
            order,
            in_ring: false,
            direction: None,
        }
    }

    pub fn other(&self, atom: usize) -> usize {
        if self.a == atom {
            self.b
        } else {
            self.a
        }
    }

    pub fn contains(&self, atom: usize) -> bool {
        self.a == atom || self.b == atom
    }
}

/// An immutable molecular graph with derived ring membership and
/// connected components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MolecularGraph {
    atoms: Vec<Atom>,
    bonds: Vec<Bond>,
    /// Per atom: (neighbor atom, bond index), in bond insertion order.
    adjacency: Vec<Vec<(usize, usize)>>,
    atom_in_ring: Vec<bool>,
    components: Vec<Vec<usize>>,
}

impl MolecularGraph {
    /// Builds a graph, checking structural invariants and computing ring
    /// flags and components. Valence is not checked here; see
    /// [`MolecularGraph::check_valence`].
    pub fn new(atoms: Vec<Atom>, mut bonds: Vec<Bond>) -> Result<Self, ChemError> {
        let n = atoms.len();
        for atom in &atoms {
            if !(-4..=4).contains(&atom.formal_charge) {
                return Err(ChemError::ChargeOutOfRange(atom.formal_charge));
            }
        }
        let mut adjacency = vec![Vec::new(); n];
        for (i, bond) in bonds.iter().enumerate() {
            if bond.a >= n || bond.b >= n {
                return Err(ChemError::InvalidBond(format!("bond {i} references a missing atom")));
            }
            if bond.a == bond.b {
                return Err(ChemError::InvalidBond(format!("bond {i} is a self-bond")));
            }
            if adjacency[bond.a].iter().any(|&(nb, _)| nb == bond.b) {
                return Err(ChemError::InvalidBond(format!(
                    "duplicate bond between atoms {} and {}",
                    bond.a, bond.b
                )));
            }
            if bond.order == BondOrder::Aromatic && !(atoms[bond.a].aromatic && atoms[bond.b].aromatic) {
                return Err(ChemError::InvalidBond(format!(
                    "aromatic bond {i} joins a non-aromatic atom"
                )));
            }
            adjacency[bond.a].push((bond.b, i));
            adjacency[bond.b].push((bond.a, i));
        }

        let bridges = find_bridges(n, &bonds, &adjacency);
        let mut atom_in_ring = vec![false; n];
        for (i, bond) in bonds.iter_mut().enumerate() {
            bond.in_ring = !bridges[i];
            if bond.in_ring {
                atom_in_ring[bond.a] = true;
                atom_in_ring[bond.b] = true;
            }
        }
        let components = connected_components(n, &adjacency);
        Ok(MolecularGraph {
            atoms,
            bonds,
            adjacency,
            atom_in_ring,
            components,
        })
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn atom(&self, i: usize) -> &Atom {
        &self.atoms[i]
    }

    pub fn bonds(&self) -> &[Bond] {
        &self.bonds
    }

    pub fn bond(&self, i: usize) -> &Bond {
        &self.bonds[i]
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn bond_count(&self) -> usize {
        self.bonds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn components(&self) -> &[Vec<usize>] {
        &self.components
    }

    /// Component index per atom.
    pub fn component_of(&self) -> Vec<usize> {
        let mut out = vec![0; self.atoms.len()];
        for (c, comp) in self.components.iter().enumerate() {
            for &a in comp {
                out[a] = c;
            }
        }
        out
    }

    /// `(neighbor, bond index)` pairs.
    pub fn neighbors(&self, atom: usize) -> &[(usize, usize)] {
        &self.adjacency[atom]
    }

    pub fn degree(&self, atom: usize) -> usize {
        self.adjacency[atom].len()
    }

    pub fn bond_between(&self, a: usize, b: usize) -> Option<usize> {
        self.adjacency[a].iter().find(|&&(nb, _)| nb == b).map(|&(_, bi)| bi)
    }

    pub fn atom_in_ring(&self, atom: usize) -> bool {
        self.atom_in_ring[atom]
    }

    /// Cyclomatic number: independent cycles in the graph.
    pub fn cycle_rank(&self) -> usize {
        self.bonds.len() + self.components.len() - self.atoms.len()
    }

    pub fn heavy_atom_count(&self) -> usize {
        self.atoms.iter().filter(|a| a.is_heavy()).count()
    }

    /// Sum of bond valence contributions around an atom.
    pub fn bond_valence_sum(&self, atom: usize) -> u32 {
        self.adjacency[atom]
            .iter()
            .map(|&(_, bi)| u32::from(self.bonds[bi].order.valence()))
            .sum()
    }

    /// Implicit hydrogen count for bare atoms; zero for bracket atoms and
    /// wildcards.
    pub fn implicit_hydrogens(&self, atom: usize) -> u32 {
        let a = &self.atoms[atom];
        if !a.is_bare() || a.is_wildcard() {
            return 0;
        }
        let valences = a.element.valences();
        if valences.is_empty() {
            return 0;
        }
        let mut used = self.bond_valence_sum(atom);
        if a.aromatic {
            // The delocalized pi contribution occupies one valence slot; an
            // aromatic atom above its lowest valence carries no hydrogens.
            used += 1;
            let lowest = u32::from(valences[0]);
            return lowest.saturating_sub(used);
        }
        valences
            .iter()
            .map(|&v| u32::from(v))
            .find(|&v| v >= used)
            .map_or(0, |v| v - used)
    }

    /// Total attached hydrogens: implicit, bracket count, and explicit
    /// hydrogen atoms bonded to this atom.
    pub fn total_hydrogens(&self, atom: usize) -> u32 {
        let bracket = u32::from(self.atoms[atom].explicit_h.unwrap_or(0));
        let neighbors = self.adjacency[atom]
            .iter()
            .filter(|&&(nb, _)| self.atoms[nb].element.is_hydrogen())
            .count() as u32;
        self.implicit_hydrogens(atom) + bracket + neighbors
    }

    /// Checks the permissive valence table. Aromatic atoms are checked with
    /// aromatic bonds counting one (one fewer than their pi-inclusive
    /// valence); charged atoms and atoms with bracket hydrogen counts are
    /// skipped.
    pub fn check_valence(&self) -> Result<(), ChemError> {
        for (i, a) in self.atoms.iter().enumerate() {
            if a.formal_charge != 0 || a.explicit_h.is_some() || a.is_wildcard() {
                continue;
            }
            let valences = a.element.valences();
            let Some(&max) = valences.last() else { continue };
            let used = self.bond_valence_sum(i);
            if used > u32::from(max) {
                return Err(ChemError::ValenceViolation {
                    atom: i,
                    element: a.element.symbol().to_string(),
                    valence: used,
                });
            }
        }
        Ok(())
    }

    /// Rejects aromatic atoms that are not part of any ring.
    pub fn check_aromatic_rings(&self) -> Result<(), ChemError> {
        for (i, a) in self.atoms.iter().enumerate() {
            if a.aromatic && !a.is_wildcard() && !self.atom_in_ring[i] {
                return Err(ChemError::AromaticOutsideRing { atom: i });
            }
        }
        Ok(())
    }

    /// Induced subgraph over `atoms` (in the given order). Returns the graph
    /// and, for each kept bond, its index in `self`.
    pub fn subgraph(&self, atoms: &[usize]) -> (MolecularGraph, Vec<usize>) {
        let mut new_index = vec![usize::MAX; self.atoms.len()];
        for (k, &a) in atoms.iter().enumerate() {
            new_index[a] = k;
        }
        let new_atoms = atoms.iter().map(|&a| self.atoms[a].clone()).collect();
        let mut new_bonds = Vec::new();
        let mut origin = Vec::new();
        for (bi, bond) in self.bonds.iter().enumerate() {
            let (na, nb) = (new_index[bond.a], new_index[bond.b]);
            if na != usize::MAX && nb != usize::MAX {
                new_bonds.push(Bond {
                    a: na,
                    b: nb,
                    ..bond.clone()
                });
                origin.push(bi);
            }
        }
        let graph = MolecularGraph::new(new_atoms, new_bonds).expect("induced subgraph of a valid graph is valid");
        (graph, origin)
    }

    /// Reorders atoms so that new atom `i` is old atom `order[i]`.
    pub fn permuted(&self, order: &[usize]) -> MolecularGraph {
        assert_eq!(order.len(), self.atoms.len());
        let mut new_index = vec![0; order.len()];
        for (k, &old) in order.iter().enumerate() {
            new_index[old] = k;
        }
        let atoms = order.iter().map(|&o| self.atoms[o].clone()).collect();
        let bonds = self
            .bonds
            .iter()
            .map(|b| Bond {
                a: new_index[b.a],
                b: new_index[b.b],
                ..b.clone()
            })
            .collect();
        MolecularGraph::new(atoms, bonds).expect("permutation of a valid graph is valid")
    }

    pub(crate) fn into_parts(self) -> (Vec<Atom>, Vec<Bond>) {
        (self.atoms, self.bonds)
    }
}

fn connected_components(n: usize, adjacency: &[Vec<(usize, usize)>]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; n];
    let mut components = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut comp = vec![start];
        let mut stack = vec![start];
        while let Some(u) = stack.pop() {
            for &(v, _) in &adjacency[u] {
                if !seen[v] {
                    seen[v] = true;
                    comp.push(v);
                    stack.push(v);
                }
            }
        }
        comp.sort_unstable();
        components.push(comp);
    }
    components
}

/// Iterative Tarjan bridge detection. A bond is in a ring iff it is not a
/// bridge.
fn find_bridges(n: usize, bonds: &[Bond], adjacency: &[Vec<(usize, usize)>]) -> Vec<bool> {
    let mut is_bridge = vec![false; bonds.len()];
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut timer = 0;
    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        // (atom, bond used to enter, next adjacency position)
        let mut stack: Vec<(usize, usize, usize)> = vec![(root, usize::MAX, 0)];
        disc[root] = timer;
        low[root] = timer;
        timer += 1;
        while let Some(top) = stack.len().checked_sub(1) {
            let (u, parent_bond, pos) = stack[top];
            if pos < adjacency[u].len() {
                let (v, bi) = adjacency[u][pos];
                stack[top].2 += 1;
                if bi == parent_bond {
                    continue;
                }
                if disc[v] == usize::MAX {
                    disc[v] = timer;
                    low[v] = timer;
                    timer += 1;
                    stack.push((v, bi, 0));
                } else {
                    low[u] = low[u].min(disc[v]);
                }
            } else {
                stack.pop();
                if let Some(&(p, _, _)) = stack.last() {
                    low[p] = low[p].min(low[u]);
                    if low[u] > disc[p] {
                        is_bridge[parent_bond] = true;
                    }
                }
            }
        }
    }
    is_bridge
}
