use crate::canon::{canonical_key_unchecked, MotifKey};
use crate::molecule::Molecule;

/// A connected set of atoms of one parent molecule, with its induced bonds.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Fragment {
    atoms: Vec<usize>,
    bonds: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FragmentError {
    #[error("fragment has no atoms")]
    Empty,
    #[error("atom {0} is outside the parent molecule")]
    OutOfRange(usize),
    #[error("atom {0} listed twice")]
    Duplicate(usize),
    #[error("fragment atoms induce a disconnected subgraph")]
    Disconnected,
}

impl Fragment {
    pub fn new(mol: &Molecule, atoms: &[usize]) -> Result<Fragment, FragmentError> {
        if atoms.is_empty() {
            return Err(FragmentError::Empty);
        }
        let mut sorted = atoms.to_vec();
        sorted.sort_unstable();
        for w in sorted.windows(2) {
            if w[0] == w[1] {
                return Err(FragmentError::Duplicate(w[0]));
            }
        }
        if let Some(&bad) = sorted.iter().find(|&&a| a >= mol.atom_count()) {
            return Err(FragmentError::OutOfRange(bad));
        }
        if !mol.is_connected_within(&sorted) {
            return Err(FragmentError::Disconnected);
        }
        Ok(Fragment::from_sorted(mol, sorted))
    }

    /// Caller guarantees `atoms` is sorted, unique and connected.
    pub(crate) fn from_sorted(mol: &Molecule, atoms: Vec<usize>) -> Fragment {
        let bonds = mol.induced_bonds(&atoms);
        Fragment { atoms, bonds }
    }

    pub fn single(atom: usize) -> Fragment {
        Fragment {
            atoms: vec![atom],
            bonds: Vec::new(),
        }
    }

    /// Parent atom indices, ascending.
    pub fn atoms(&self) -> &[usize] {
        &self.atoms
    }

    /// Parent bond indices with both endpoints inside, ascending.
    pub fn bonds(&self) -> &[usize] {
        &self.bonds
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn min_atom(&self) -> usize {
        self.atoms[0]
    }

    /// The fragment as a standalone molecule (atom `i` = `atoms()[i]`).
    pub fn to_molecule(&self, mol: &Molecule) -> Molecule {
        mol.induced(&self.atoms)
    }

    pub fn key(&self, mol: &Molecule, charge_sensitive: bool) -> MotifKey {
        canonical_key_unchecked(&self.to_molecule(mol), charge_sensitive)
    }
}
