use std::fmt;

/// A chemical element identified by atomic number. Atomic number 0 is the
/// SMILES wildcard `*`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub struct Element(u8);

struct ElementData {
    number: u8,
    symbol: &'static str,
    /// Standard atomic weight, 3-decimal precision.
    mass: f64,
}

macro_rules! elements {
    ($(($z:expr, $sym:expr, $mass:expr)),* $(,)?) => {
        &[$(ElementData { number: $z, symbol: $sym, mass: $mass }),*]
    };
}

static TABLE: &[ElementData] = elements![
    (0, "*", 0.0),
    (1, "H", 1.008),
    (2, "He", 4.003),
    (3, "Li", 6.940),
    (4, "Be", 9.012),
    (5, "B", 10.810),
    (6, "C", 12.011),
    (7, "N", 14.007),
    (8, "O", 15.999),
    (9, "F", 18.998),
    (10, "Ne", 20.180),
    (11, "Na", 22.990),
    (12, "Mg", 24.305),
    (13, "Al", 26.982),
    (14, "Si", 28.085),
    (15, "P", 30.974),
    (16, "S", 32.060),
    (17, "Cl", 35.450),
    (18, "Ar", 39.948),
    (19, "K", 39.098),
    (20, "Ca", 40.078),
    (21, "Sc", 44.956),
    (22, "Ti", 47.867),
    (23, "V", 50.942),
    (24, "Cr", 51.996),
    (25, "Mn", 54.938),
    (26, "Fe", 55.845),
    (27, "Co", 58.933),
    (28, "Ni", 58.693),
    (29, "Cu", 63.546),
    (30, "Zn", 65.380),
    (31, "Ga", 69.723),
    (32, "Ge", 72.630),
    (33, "As", 74.922),
    (34, "Se", 78.971),
    (35, "Br", 79.904),
    (36, "Kr", 83.798),
    (37, "Rb", 85.468),
    (38, "Sr", 87.620),
    (39, "Y", 88.906),
    (40, "Zr", 91.224),
    (41, "Nb", 92.906),
    (42, "Mo", 95.950),
    (43, "Tc", 97.907),
    (44, "Ru", 101.070),
    (45, "Rh", 102.906),
    (46, "Pd", 106.420),
    (47, "Ag", 107.868),
    (48, "Cd", 112.414),
    (49, "In", 114.818),
    (50, "Sn", 118.710),
    (51, "Sb", 121.760),
    (52, "Te", 127.600),
    (53, "I", 126.904),
    (54, "Xe", 131.293),
    (55, "Cs", 132.905),
    (56, "Ba", 137.327),
    (64, "Gd", 157.250),
    (78, "Pt", 195.084),
    (79, "Au", 196.967),
    (80, "Hg", 200.592),
    (81, "Tl", 204.380),
    (82, "Pb", 207.200),
    (83, "Bi", 208.980),
];

impl Element {
    pub const WILDCARD: Element = Element(0);
    pub const H: Element = Element(1);
    pub const B: Element = Element(5);
    pub const C: Element = Element(6);
    pub const N: Element = Element(7);
    pub const O: Element = Element(8);
    pub const F: Element = Element(9);
    pub const P: Element = Element(15);
    pub const S: Element = Element(16);
    pub const CL: Element = Element(17);
    pub const BR: Element = Element(35);
    pub const I: Element = Element(53);

    /// Looks up an element by its (capitalized) symbol.
    pub fn from_symbol(symbol: &str) -> Option<Element> {
        TABLE.iter().find(|e| e.symbol == symbol).map(|e| Element(e.number))
    }

    pub fn from_atomic_number(z: u8) -> Option<Element> {
        TABLE.iter().find(|e| e.number == z).map(|e| Element(e.number))
    }

    fn data(self) -> &'static ElementData {
        TABLE
            .iter()
            .find(|e| e.number == self.0)
            .expect("Element is only constructed from table entries")
    }

    pub fn atomic_number(self) -> u8 {
        self.0
    }

    pub fn symbol(self) -> &'static str {
        self.data().symbol
    }

    pub fn mass(self) -> f64 {
        self.data().mass
    }

    pub fn is_wildcard(self) -> bool {
        self.0 == 0
    }

    pub fn is_hydrogen(self) -> bool {
        self.0 == 1
    }

    /// Heavy atoms are everything except hydrogen and the wildcard.
    pub fn is_heavy(self) -> bool {
        self.0 > 1
    }

    /// Members of the SMILES organic subset may be written without brackets.
    pub fn is_organic_subset(self) -> bool {
        matches!(self.0, 0 | 5 | 6 | 7 | 8 | 9 | 15 | 16 | 17 | 35 | 53)
    }

    /// Elements that may carry the aromatic (lowercase) flag.
    pub fn can_be_aromatic(self) -> bool {
        matches!(self.0, 0 | 5 | 6 | 7 | 8 | 15 | 16 | 33 | 34 | 52)
    }

    /// Permissive allowed valences, ascending. Empty when the element is not
    /// subject to valence checking.
    pub fn valences(self) -> &'static [u8] {
        match self.0 {
            5 => &[3],
            6 => &[4],
            7 | 15 => &[3, 5],
            8 => &[2],
            16 => &[2, 4, 6],
            9 | 17 | 35 | 53 => &[1],
            _ => &[],
        }
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}
