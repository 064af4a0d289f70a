//! Supported chemical elements and the valence table.
//!
//! Every valence decision in the crate (parsing, SMILES hydrogen filling,
//! assembly valency correction) goes through [`allowed_valences`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Heavy elements the toolkit understands. Hydrogen only exists implicitly.
#[derive(Debug, Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Element {
    B,
    C,
    N,
    O,
    F,
    Si,
    P,
    S,
    Cl,
    Se,
    Br,
    I,
}

/// Smallest and largest formal charge accepted on an atom.
pub const MIN_CHARGE: i8 = -4;
pub const MAX_CHARGE: i8 = 4;

impl Element {
    pub const ALL: [Element; 12] = [
        Element::B,
        Element::C,
        Element::N,
        Element::O,
        Element::F,
        Element::Si,
        Element::P,
        Element::S,
        Element::Cl,
        Element::Se,
        Element::Br,
        Element::I,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            Element::B => "B",
            Element::C => "C",
            Element::N => "N",
            Element::O => "O",
            Element::F => "F",
            Element::Si => "Si",
            Element::P => "P",
            Element::S => "S",
            Element::Cl => "Cl",
            Element::Se => "Se",
            Element::Br => "Br",
            Element::I => "I",
        }
    }

    pub fn atomic_number(self) -> u8 {
        match self {
            Element::B => 5,
            Element::C => 6,
            Element::N => 7,
            Element::O => 8,
            Element::F => 9,
            Element::Si => 14,
            Element::P => 15,
            Element::S => 16,
            Element::Cl => 17,
            Element::Se => 34,
            Element::Br => 35,
            Element::I => 53,
        }
    }

    /// Members of the SMILES organic subset may be written without brackets.
    pub fn in_organic_subset(self) -> bool {
        !matches!(self, Element::Si | Element::Se)
    }

    fn valence_electrons(self) -> i8 {
        match self {
            Element::B => 3,
            Element::C | Element::Si => 4,
            Element::N | Element::P => 5,
            Element::O | Element::S | Element::Se => 6,
            Element::F | Element::Cl | Element::Br | Element::I => 7,
        }
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unsupported element `{0}`")]
pub struct UnsupportedElement(pub String);

impl FromStr for Element {
    type Err = UnsupportedElement;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Element::ALL
            .iter()
            .copied()
            .find(|e| e.symbol() == s)
            .ok_or_else(|| UnsupportedElement(s.to_string()))
    }
}

/// Valences an atom of `element` carrying `charge` may adopt, ascending.
///
/// The charge moves the atom to its isoelectronic neighbour (N+ behaves like
/// C, O- like F, B- like C). Hypervalent states are only offered to neutral
/// P, S and Se; Se skips the tetravalent state. Returns an empty slice when
/// the charge leaves no bonding capacity.
pub fn allowed_valences(element: Element, charge: i8) -> &'static [u8] {
    let electrons = element.valence_electrons() - charge;
    if charge == 0 {
        match element {
            Element::P => return &[3, 5],
            Element::S => return &[2, 4, 6],
            Element::Se => return &[2, 6],
            _ => {}
        }
    }
    match electrons {
        1 => &[1],
        2 => &[2],
        3 => &[3],
        4 => &[4],
        5 => &[3],
        6 => &[2],
        7 => &[1],
        _ => &[],
    }
}

/// Largest total bond order the atom supports (explicit bonds plus hydrogens).
pub fn max_valence(element: Element, charge: i8) -> u8 {
    allowed_valences(element, charge)
        .last()
        .copied()
        .unwrap_or(0)
}

/// Hydrogens needed to bring `bond_order_sum` up to the nearest allowed
/// valence. Zero when the sum already meets or exceeds every allowed valence.
pub fn implicit_hydrogens(element: Element, charge: i8, bond_order_sum: u8) -> u8 {
    allowed_valences(element, charge)
        .iter()
        .find(|&&v| v >= bond_order_sum)
        .map(|&v| v - bond_order_sum)
        .unwrap_or(0)
}
