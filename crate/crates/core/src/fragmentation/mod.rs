//! Decomposition of a molecule into vocabulary motifs and single atoms.

mod bbb;
mod psm;
mod subcover;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::canon::MotifKey;
use crate::molecule::Molecule;
use crate::vocab::{VocabScheme, Vocabulary};

pub use bbb::{bbb_decompose, bbb_fragment};
pub use psm::psm_decompose;
pub(crate) use psm::MergeState;
pub use subcover::{find_m_in_f, subcover_decompose};

#[derive(Debug, Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Bbb,
    Psm,
    Subcover,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::Bbb, Scheme::Psm, Scheme::Subcover];

    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Bbb => "bbb",
            Scheme::Psm => "psm",
            Scheme::Subcover => "subcover",
        }
    }

    /// The vocabulary family this scheme decomposes with.
    pub fn vocab_scheme(self) -> VocabScheme {
        match self {
            Scheme::Bbb | Scheme::Subcover => VocabScheme::Bbb,
            Scheme::Psm => VocabScheme::Psm,
        }
    }

    /// BBB only looks up whole fragments, so any vocabulary works; PSM and
    /// Subcover rely on the construction contract of their own family.
    pub fn accepts(self, vocab: VocabScheme) -> bool {
        match self {
            Scheme::Bbb => true,
            Scheme::Psm => vocab == VocabScheme::Psm,
            Scheme::Subcover => vocab == VocabScheme::Bbb,
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "bbb" => Ok(Scheme::Bbb),
            "psm" => Ok(Scheme::Psm),
            "subcover" => Ok(Scheme::Subcover),
            other => Err(format!(
                "unknown scheme `{other}` (expected bbb, psm or subcover)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("scheme {scheme} cannot use a {vocab} vocabulary")]
pub struct SchemeMismatch {
    pub scheme: Scheme,
    pub vocab: VocabScheme,
}

/// A motif occurrence: parent atom indices (ascending) and the key of the
/// vocabulary entry it was matched against.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Motif {
    pub atoms: Vec<usize>,
    pub key: MotifKey,
}

/// Partition of a molecule's atoms into motifs and single atoms, with the
/// matching split of its bonds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    scheme: Scheme,
    motifs: Vec<Motif>,
    singles: Vec<usize>,
    intra_bonds: Vec<usize>,
    inter_bonds: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PartitionError {
    #[error("atom {0} is not covered by any fragment")]
    Uncovered(usize),
    #[error("atom {0} belongs to more than one fragment")]
    Overlap(usize),
    #[error("atom {0} is outside the molecule")]
    OutOfRange(usize),
    #[error("motif starting at atom {0} has fewer than two atoms")]
    TinyMotif(usize),
    #[error("motif starting at atom {0} is disconnected")]
    DisconnectedMotif(usize),
    #[error("bond {0} is misclassified")]
    BondSplit(usize),
}

impl Decomposition {
    /// Builds a decomposition, sorting motifs by smallest atom and deriving
    /// the bond split from the atom partition.
    pub fn from_parts(
        mol: &Molecule,
        scheme: Scheme,
        mut motifs: Vec<Motif>,
        mut singles: Vec<usize>,
    ) -> Decomposition {
        for m in &mut motifs {
            m.atoms.sort_unstable();
        }
        motifs.sort_by(|a, b| a.atoms.cmp(&b.atoms));
        singles.sort_unstable();
        let owner = owners(mol.atom_count(), &motifs);
        let (intra_bonds, inter_bonds) = (0..mol.bond_count()).partition(|&i| {
            let b = mol.bond(i);
            owner[b.a].is_some() && owner[b.a] == owner[b.b]
        });
        Decomposition {
            scheme,
            motifs,
            singles,
            intra_bonds,
            inter_bonds,
        }
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn motifs(&self) -> &[Motif] {
        &self.motifs
    }

    pub fn singles(&self) -> &[usize] {
        &self.singles
    }

    /// Bonds with both endpoints in the same motif.
    pub fn intra_bonds(&self) -> &[usize] {
        &self.intra_bonds
    }

    /// All other bonds.
    pub fn inter_bonds(&self) -> &[usize] {
        &self.inter_bonds
    }

    /// |F| = |M| + |S|.
    pub fn cardinality(&self) -> usize {
        self.motifs.len() + self.singles.len()
    }

    /// Motif index of every atom, `None` for single atoms.
    pub fn motif_of_atoms(&self, atom_count: usize) -> Vec<Option<usize>> {
        owners(atom_count, &self.motifs)
    }

    /// Checks the partition and bond-split invariants against `mol`.
    pub fn validate(&self, mol: &Molecule) -> Result<(), PartitionError> {
        let n = mol.atom_count();
        let mut seen = vec![false; n];
        let mut mark = |a: usize| -> Result<(), PartitionError> {
            if a >= n {
                return Err(PartitionError::OutOfRange(a));
            }
            if std::mem::replace(&mut seen[a], true) {
                return Err(PartitionError::Overlap(a));
            }
            Ok(())
        };
        for m in &self.motifs {
            let first = m.atoms.first().copied().unwrap_or(usize::MAX);
            if m.atoms.len() < 2 {
                return Err(PartitionError::TinyMotif(first));
            }
            for &a in &m.atoms {
                mark(a)?;
            }
            if !mol.is_connected_within(&m.atoms) {
                return Err(PartitionError::DisconnectedMotif(first));
            }
        }
        for &s in &self.singles {
            mark(s)?;
        }
        if let Some(a) = seen.iter().position(|&s| !s) {
            return Err(PartitionError::Uncovered(a));
        }
        let owner = owners(n, &self.motifs);
        let mut classified = vec![0u8; mol.bond_count()];
        for &b in &self.intra_bonds {
            let bond = mol.bond(b);
            if owner[bond.a].is_none() || owner[bond.a] != owner[bond.b] {
                return Err(PartitionError::BondSplit(b));
            }
            classified[b] += 1;
        }
        for &b in &self.inter_bonds {
            let bond = mol.bond(b);
            if owner[bond.a].is_some() && owner[bond.a] == owner[bond.b] {
                return Err(PartitionError::BondSplit(b));
            }
            classified[b] += 1;
        }
        if let Some(b) = classified.iter().position(|&c| c != 1) {
            return Err(PartitionError::BondSplit(b));
        }
        Ok(())
    }
}

fn owners(atom_count: usize, motifs: &[Motif]) -> Vec<Option<usize>> {
    let mut owner = vec![None; atom_count];
    for (i, m) in motifs.iter().enumerate() {
        for &a in &m.atoms {
            owner[a] = Some(i);
        }
    }
    owner
}

/// Decomposes `mol` with the given scheme after checking vocabulary
/// compatibility.
pub fn decompose(
    mol: &Molecule,
    vocab: &Vocabulary,
    scheme: Scheme,
) -> Result<Decomposition, SchemeMismatch> {
    match scheme {
        Scheme::Bbb => Ok(bbb_decompose(mol, vocab)),
        Scheme::Psm => psm_decompose(mol, vocab),
        Scheme::Subcover => subcover_decompose(mol, vocab),
    }
}

pub(crate) fn check_scheme(scheme: Scheme, vocab: &Vocabulary) -> Result<(), SchemeMismatch> {
    if scheme.accepts(vocab.scheme()) {
        Ok(())
    } else {
        Err(SchemeMismatch {
            scheme,
            vocab: vocab.scheme(),
        })
    }
}
