//! Heavy-atom molecular graph with single, double and triple bonds.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::element::{self, Element, MAX_CHARGE, MIN_CHARGE};

#[derive(Debug, Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum BondOrder {
    Single = 1,
    Double = 2,
    Triple = 3,
}

impl BondOrder {
    pub fn value(self) -> u8 {
        self as u8
    }

    pub fn from_value(v: u8) -> Option<BondOrder> {
        match v {
            1 => Some(BondOrder::Single),
            2 => Some(BondOrder::Double),
            3 => Some(BondOrder::Triple),
            _ => None,
        }
    }
}

#[derive(Debug, Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Atom {
    pub element: Element,
    pub charge: i8,
}

impl Atom {
    pub fn new(element: Element, charge: i8) -> Atom {
        Atom { element, charge }
    }

    pub fn max_valence(&self) -> u8 {
        element::max_valence(self.element, self.charge)
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.element)?;
        match self.charge {
            0 => Ok(()),
            1 => f.write_str("+"),
            -1 => f.write_str("-"),
            c if c > 0 => write!(f, "+{c}"),
            c => write!(f, "{c}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid atom label `{0}`")]
pub struct AtomLabelError(pub String);

/// Parses the [`Display`](fmt::Display) form: element symbol, then an
/// optional `+`, `-`, `+n` or `-n`.
impl std::str::FromStr for Atom {
    type Err = AtomLabelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || AtomLabelError(s.to_string());
        let split = s.find(['+', '-']).unwrap_or(s.len());
        let (sym, charge) = s.split_at(split);
        let element: Element = sym.parse().map_err(|_| bad())?;
        let charge: i8 = match charge {
            "" => 0,
            "+" => 1,
            "-" => -1,
            c => {
                let v: i8 = c[1..].parse().map_err(|_| bad())?;
                if c[1..].starts_with(['+', '-']) {
                    return Err(bad());
                }
                if c.starts_with('-') {
                    -v
                } else {
                    v
                }
            }
        };
        if !(MIN_CHARGE..=MAX_CHARGE).contains(&charge) {
            return Err(bad());
        }
        Ok(Atom::new(element, charge))
    }
}

/// An undirected bond; `a < b` always holds.
#[derive(Debug, Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Bond {
    pub a: usize,
    pub b: usize,
    pub order: BondOrder,
}

impl Bond {
    pub fn new(u: usize, v: usize, order: BondOrder) -> Bond {
        let (a, b) = if u <= v { (u, v) } else { (v, u) };
        Bond { a, b, order }
    }

    pub fn other(&self, atom: usize) -> usize {
        if atom == self.a {
            self.b
        } else {
            self.a
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MoleculeError {
    #[error("atom {atom}: formal charge {charge} outside [{MIN_CHARGE}, {MAX_CHARGE}]")]
    ChargeOutOfRange { atom: usize, charge: i8 },
    #[error("bond {a}-{b} references a missing atom")]
    BondOutOfRange { a: usize, b: usize },
    #[error("bond {0}-{0} is a self loop")]
    SelfLoop(usize),
    #[error("duplicate bond between atoms {a} and {b}")]
    DuplicateBond { a: usize, b: usize },
    #[error("atom {atom} ({label}): bond order sum {sum} exceeds maximum valence {max}")]
    Valence {
        atom: usize,
        label: String,
        sum: u8,
        max: u8,
    },
}

/// A molecular graph over heavy atoms. Hydrogens are implicit and derived
/// from the valence table when needed.
///
/// Connectivity is not enforced here: the SMILES parser rejects
/// multi-component input, while assembly may legitimately produce
/// disconnected graphs. Use [`Molecule::is_connected`] where it matters.
#[derive(Debug, Clone)]
pub struct Molecule {
    atoms: Vec<Atom>,
    bonds: Vec<Bond>,
    adjacency: Vec<Vec<(usize, usize)>>,
    source: Option<String>,
}

impl PartialEq for Molecule {
    fn eq(&self, other: &Self) -> bool {
        self.atoms == other.atoms && self.sorted_bonds() == other.sorted_bonds()
    }
}

impl Eq for Molecule {}

impl Molecule {
    /// Builds a molecule, checking charges, bond endpoints, duplicate bonds
    /// and the valence of every atom.
    pub fn new(atoms: Vec<Atom>, bonds: Vec<Bond>) -> Result<Molecule, MoleculeError> {
        let extra_h = vec![0; atoms.len()];
        Molecule::with_hydrogens(atoms, bonds, &extra_h)
    }

    /// Like [`Molecule::new`], with per-atom explicit hydrogen counts that
    /// take part in the valence check but are not stored.
    pub(crate) fn with_hydrogens(
        atoms: Vec<Atom>,
        bonds: Vec<Bond>,
        hydrogens: &[u8],
    ) -> Result<Molecule, MoleculeError> {
        let mol = Molecule::unchecked(atoms, bonds)?;
        for (i, atom) in mol.atoms.iter().enumerate() {
            if !(MIN_CHARGE..=MAX_CHARGE).contains(&atom.charge) {
                return Err(MoleculeError::ChargeOutOfRange {
                    atom: i,
                    charge: atom.charge,
                });
            }
            let sum = mol.bond_order_sum(i) + hydrogens[i];
            let max = atom.max_valence();
            if sum > max {
                return Err(MoleculeError::Valence {
                    atom: i,
                    label: atom.to_string(),
                    sum,
                    max,
                });
            }
        }
        Ok(mol)
    }

    /// Structural checks only (endpoints, loops, duplicates); no valence check.
    pub(crate) fn unchecked(atoms: Vec<Atom>, bonds: Vec<Bond>) -> Result<Molecule, MoleculeError> {
        let n = atoms.len();
        let mut adjacency = vec![Vec::new(); n];
        for (idx, bond) in bonds.iter().enumerate() {
            if bond.a >= n || bond.b >= n {
                return Err(MoleculeError::BondOutOfRange {
                    a: bond.a,
                    b: bond.b,
                });
            }
            if bond.a == bond.b {
                return Err(MoleculeError::SelfLoop(bond.a));
            }
            if adjacency[bond.a].iter().any(|&(nb, _)| nb == bond.b) {
                return Err(MoleculeError::DuplicateBond {
                    a: bond.a,
                    b: bond.b,
                });
            }
            adjacency[bond.a].push((bond.b, idx));
            adjacency[bond.b].push((bond.a, idx));
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(Molecule {
            atoms,
            bonds,
            adjacency,
            source: None,
        })
    }

    pub fn with_source(mut self, source: impl Into<String>) -> Molecule {
        self.source = Some(source.into());
        self
    }

    pub fn source(&self) -> Option<&str> {
        self.source.as_deref()
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn atom(&self, i: usize) -> Atom {
        self.atoms[i]
    }

    pub fn bonds(&self) -> &[Bond] {
        &self.bonds
    }

    pub fn bond(&self, i: usize) -> Bond {
        self.bonds[i]
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn bond_count(&self) -> usize {
        self.bonds.len()
    }

    /// `(neighbour, bond index)` pairs sorted by neighbour index.
    pub fn neighbors(&self, atom: usize) -> &[(usize, usize)] {
        &self.adjacency[atom]
    }

    pub fn degree(&self, atom: usize) -> usize {
        self.adjacency[atom].len()
    }

    pub fn bond_between(&self, u: usize, v: usize) -> Option<usize> {
        self.adjacency[u]
            .binary_search_by_key(&v, |&(nb, _)| nb)
            .ok()
            .map(|pos| self.adjacency[u][pos].1)
    }

    pub fn bond_order_sum(&self, atom: usize) -> u8 {
        self.adjacency[atom]
            .iter()
            .map(|&(_, b)| self.bonds[b].order.value())
            .sum()
    }

    /// Bonds sorted by endpoints; the order-independent bond set.
    pub fn sorted_bonds(&self) -> Vec<Bond> {
        let mut bonds = self.bonds.clone();
        bonds.sort_unstable();
        bonds
    }

    pub fn is_connected(&self) -> bool {
        self.atoms.is_empty() || self.components().len() == 1
    }

    /// Connected components as sorted atom lists, ordered by smallest atom.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let all: Vec<usize> = (0..self.atom_count()).collect();
        self.components_within(&all)
    }

    /// Connected components of the subgraph induced by `subset`, each sorted,
    /// ordered by smallest atom index.
    pub fn components_within(&self, subset: &[usize]) -> Vec<Vec<usize>> {
        let mut member = vec![false; self.atom_count()];
        for &a in subset {
            member[a] = true;
        }
        let mut seen = vec![false; self.atom_count()];
        let mut sorted = subset.to_vec();
        sorted.sort_unstable();
        let mut out = Vec::new();
        let mut queue = VecDeque::new();
        for &start in &sorted {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            queue.push_back(start);
            let mut comp = Vec::new();
            while let Some(v) = queue.pop_front() {
                comp.push(v);
                for &(nb, _) in &self.adjacency[v] {
                    if member[nb] && !seen[nb] {
                        seen[nb] = true;
                        queue.push_back(nb);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Whether the subgraph induced by a non-empty `subset` is connected.
    pub fn is_connected_within(&self, subset: &[usize]) -> bool {
        !subset.is_empty() && self.components_within(subset).len() == 1
    }

    /// Indices of bonds with both endpoints in `subset`, ascending.
    pub fn induced_bonds(&self, subset: &[usize]) -> Vec<usize> {
        let mut member = vec![false; self.atom_count()];
        for &a in subset {
            member[a] = true;
        }
        (0..self.bond_count())
            .filter(|&i| member[self.bonds[i].a] && member[self.bonds[i].b])
            .collect()
    }

    /// The subgraph induced by `subset` as a standalone molecule; atom `i`
    /// of the result is `subset[i]` of `self`.
    pub fn induced(&self, subset: &[usize]) -> Molecule {
        let mut local = vec![usize::MAX; self.atom_count()];
        for (i, &a) in subset.iter().enumerate() {
            local[a] = i;
        }
        let atoms = subset.iter().map(|&a| self.atoms[a]).collect();
        let bonds = self
            .induced_bonds(subset)
            .into_iter()
            .map(|i| {
                let b = self.bonds[i];
                Bond::new(local[b.a], local[b.b], b.order)
            })
            .collect();
        Molecule::unchecked(atoms, bonds).expect("induced subgraph of a valid molecule")
    }

    /// Copy of the molecule without the listed bonds.
    pub fn without_bonds(&self, removed: &[usize]) -> Molecule {
        let bonds = self
            .bonds
            .iter()
            .enumerate()
            .filter(|(i, _)| !removed.contains(i))
            .map(|(_, b)| *b)
            .collect();
        Molecule::unchecked(self.atoms.clone(), bonds).expect("bond subset of a valid molecule")
    }
}
