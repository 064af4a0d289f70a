//! Line-delimited JSON records exchanged with other tools.
//!
//! Decomposition record:
//!
//! ```json
//! {"id":"m1","scheme":"bbb","motifs":[{"key":"q:…","smiles":"C1CCCCC1","atoms":[0,1,2,3,4,5]}],
//!  "singles":[6],"inter_bonds":[[5,6,1]]}
//! ```
//!
//! Atom indices follow the parse order of the input SMILES. `key` and
//! `smiles` identify the vocabulary motif the atoms were matched against.
//!
//! Assembly input record:
//!
//! ```json
//! {"id":"g1","atoms":["C","C","N+"],"motifs":[{"atoms":[0,1],"bonds":[[0,1,1]]}],
//!  "candidates":[[1,2,1,0.9]]}
//! ```
//!
//! Data files start with a [`FileHeader`] line.

use serde::{Deserialize, Serialize};

use crate::assemble::{AssembleError, Assembled, Candidate, ScoredBondGraph};
use crate::canon::MotifKey;
use crate::fragmentation::{Decomposition, Motif, PartitionError, Scheme};
use crate::molecule::{Atom, Bond, BondOrder, Molecule};
use crate::smiles::write_smiles;
use crate::vocab::{Vocabulary, FORMAT_VERSION};

/// First line of every JSON-lines output file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileHeader {
    pub format_version: u32,
    pub kind: String,
    pub config_fingerprint: String,
}

impl FileHeader {
    pub fn new(kind: impl Into<String>, config_fingerprint: impl Into<String>) -> FileHeader {
        FileHeader {
            format_version: FORMAT_VERSION,
            kind: kind.into(),
            config_fingerprint: config_fingerprint.into(),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RecordError {
    #[error("invalid motif key: {0}")]
    Key(String),
    #[error("bond order {0} is not 1, 2 or 3")]
    BondOrder(u8),
    #[error("invalid atom label `{0}`")]
    AtomLabel(String),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    Assemble(#[from] AssembleError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MotifRecord {
    pub key: String,
    pub smiles: String,
    pub atoms: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionRecord {
    pub id: String,
    pub scheme: Scheme,
    pub motifs: Vec<MotifRecord>,
    pub singles: Vec<usize>,
    /// `[u, v, order]` with `u < v`.
    pub inter_bonds: Vec<[usize; 3]>,
}

impl DecompositionRecord {
    pub fn new(
        id: impl Into<String>,
        mol: &Molecule,
        decomposition: &Decomposition,
        vocab: &Vocabulary,
    ) -> DecompositionRecord {
        let motifs = decomposition
            .motifs()
            .iter()
            .map(|m| MotifRecord {
                key: m.key.to_hex(),
                smiles: vocab
                    .get(&m.key)
                    .map(|e| e.smiles.clone())
                    .unwrap_or_else(|| write_smiles(&mol.induced(&m.atoms))),
                atoms: m.atoms.clone(),
            })
            .collect();
        let inter_bonds = decomposition
            .inter_bonds()
            .iter()
            .map(|&b| {
                let bond = mol.bond(b);
                [bond.a, bond.b, bond.order.value() as usize]
            })
            .collect();
        DecompositionRecord {
            id: id.into(),
            scheme: decomposition.scheme(),
            motifs,
            singles: decomposition.singles().to_vec(),
            inter_bonds,
        }
    }

    /// |F| of the record.
    pub fn cardinality(&self) -> usize {
        self.motifs.len() + self.singles.len()
    }

    /// Rebuilds the decomposition against its molecule and validates it.
    pub fn to_decomposition(&self, mol: &Molecule) -> Result<Decomposition, RecordError> {
        let motifs = self
            .motifs
            .iter()
            .map(|m| {
                let key: MotifKey = m.key.parse().map_err(|_| RecordError::Key(m.key.clone()))?;
                Ok(Motif {
                    atoms: m.atoms.clone(),
                    key,
                })
            })
            .collect::<Result<Vec<_>, RecordError>>()?;
        let d = Decomposition::from_parts(mol, self.scheme, motifs, self.singles.clone());
        d.validate(mol)?;
        Ok(d)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssembleMotif {
    pub atoms: Vec<usize>,
    pub bonds: Vec<[usize; 3]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssembleRecord {
    pub id: String,
    /// Atom labels such as `C`, `N+` or `O-`.
    pub atoms: Vec<String>,
    pub motifs: Vec<AssembleMotif>,
    /// `[u, v, order, confidence]`.
    pub candidates: Vec<(usize, usize, u8, f64)>,
}

fn order(v: usize) -> Result<BondOrder, RecordError> {
    u8::try_from(v)
        .ok()
        .and_then(BondOrder::from_value)
        .ok_or(RecordError::BondOrder(v.min(255) as u8))
}

impl AssembleRecord {
    pub fn to_graph(&self) -> Result<ScoredBondGraph, RecordError> {
        let atoms = self
            .atoms
            .iter()
            .map(|s| {
                s.parse::<Atom>()
                    .map_err(|_| RecordError::AtomLabel(s.clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let motifs = self
            .motifs
            .iter()
            .map(|m| {
                let bonds = m
                    .bonds
                    .iter()
                    .map(|&[u, v, o]| Ok(Bond::new(u, v, order(o)?)))
                    .collect::<Result<Vec<_>, RecordError>>()?;
                Ok((m.atoms.clone(), bonds))
            })
            .collect::<Result<Vec<_>, RecordError>>()?;
        let candidates = self
            .candidates
            .iter()
            .map(|&(u, v, o, c)| Ok(Candidate::new(u, v, order(o as usize)?, c)))
            .collect::<Result<Vec<_>, RecordError>>()?;
        Ok(ScoredBondGraph::new(atoms, &motifs, candidates)?)
    }

    /// Assembly input that re-creates `mol` from its decomposition when every
    /// inter bond is offered with the given confidence function.
    pub fn from_decomposition(
        id: impl Into<String>,
        mol: &Molecule,
        decomposition: &Decomposition,
        mut confidence: impl FnMut(usize) -> f64,
    ) -> AssembleRecord {
        let motifs = decomposition
            .motifs()
            .iter()
            .map(|m| AssembleMotif {
                atoms: m.atoms.clone(),
                bonds: mol
                    .induced_bonds(&m.atoms)
                    .into_iter()
                    .map(|b| {
                        let bond = mol.bond(b);
                        [bond.a, bond.b, bond.order.value() as usize]
                    })
                    .collect(),
            })
            .collect();
        let candidates = decomposition
            .inter_bonds()
            .iter()
            .map(|&b| {
                let bond = mol.bond(b);
                (bond.a, bond.b, bond.order.value(), confidence(b))
            })
            .collect();
        AssembleRecord {
            id: id.into(),
            atoms: mol.atoms().iter().map(|a| a.to_string()).collect(),
            motifs,
            candidates,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssembledRecord {
    pub id: String,
    /// Canonical SMILES; components joined by `.` when disconnected.
    pub smiles: String,
    pub connected: bool,
    pub accepted: Vec<[usize; 3]>,
    pub removed: Vec<[usize; 3]>,
}

impl AssembledRecord {
    pub fn new(id: impl Into<String>, out: &Assembled) -> AssembledRecord {
        let triple = |b: &Bond| [b.a, b.b, b.order.value() as usize];
        AssembledRecord {
            id: id.into(),
            smiles: write_smiles(&out.molecule),
            connected: out.connected,
            accepted: out.accepted.iter().map(triple).collect(),
            removed: out.removed.iter().map(triple).collect(),
        }
    }
}
