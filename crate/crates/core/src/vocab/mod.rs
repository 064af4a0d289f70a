//! Motif vocabularies: construction, lookup and the on-disk format.

mod build;
mod io;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::canon::{canonical_key_unchecked, MotifKey};
use crate::element::Element;
use crate::molecule::Molecule;
use crate::rings::perceive_rings;
use crate::smiles::{parse_smiles, write_smiles, SmilesError};

pub use build::{bbb_build_vocab, bbb_motif_counts, corpus_hash, psm_build_vocab};
pub use io::{load_vocab, read_vocab, save_vocab, write_vocab, VocabHeader, FORMAT_VERSION};

/// Which fragmentation family produced a vocabulary.
#[derive(Debug, Copy, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VocabScheme {
    Bbb,
    Psm,
}

impl VocabScheme {
    pub fn as_str(self) -> &'static str {
        match self {
            VocabScheme::Bbb => "bbb",
            VocabScheme::Psm => "psm",
        }
    }
}

impl fmt::Display for VocabScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for VocabScheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "bbb" => Ok(VocabScheme::Bbb),
            "psm" => Ok(VocabScheme::Psm),
            other => Err(format!("unknown vocabulary scheme `{other}`")),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum VocabError {
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("vocabulary size must be at least 1")]
    InvalidK,
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("unsupported vocabulary format version {found} (expected {expected})")]
    VersionMismatch { found: u32, expected: u32 },
    #[error("line {line}: duplicate motif {smiles}")]
    DuplicateKey { line: usize, smiles: String },
    #[error("line {line}: invalid motif SMILES: {source}")]
    Smiles {
        line: usize,
        #[source]
        source: SmilesError,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One vocabulary motif.
#[derive(Debug, Clone)]
pub struct VocabEntry {
    pub key: MotifKey,
    /// Canonical SMILES of the representative fragment.
    pub smiles: String,
    /// Occurrences in the corpus (mining-time count for PSM).
    pub count: u64,
    pub atom_count: usize,
    pub has_ring: bool,
    /// The representative fragment, parsed from `smiles`.
    pub molecule: Molecule,
    element_counts: [u16; Element::ALL.len()],
}

impl PartialEq for VocabEntry {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key
            && self.smiles == other.smiles
            && self.count == other.count
            && self.atom_count == other.atom_count
            && self.has_ring == other.has_ring
    }
}

impl VocabEntry {
    /// Builds an entry from a fragment graph, normalising it through its
    /// canonical SMILES so the representative's atom order is canonical.
    pub fn from_fragment(fragment: &Molecule, count: u64) -> VocabEntry {
        let smiles = write_smiles(fragment);
        let molecule = parse_smiles(&smiles).expect("canonical SMILES of a valid fragment parses");
        VocabEntry::from_parsed(smiles, molecule, count)
    }

    fn from_parsed(smiles: String, molecule: Molecule, count: u64) -> VocabEntry {
        let key = canonical_key_unchecked(&molecule, true);
        let has_ring = perceive_rings(&molecule).has_ring_bond();
        let element_counts = element_histogram(&molecule, 0..molecule.atom_count());
        VocabEntry {
            key,
            atom_count: molecule.atom_count(),
            smiles,
            count,
            has_ring,
            molecule,
            element_counts,
        }
    }

    /// Whether the element multiset of this motif fits inside `available`.
    pub(crate) fn fits(&self, available: &[u16; Element::ALL.len()]) -> bool {
        self.element_counts
            .iter()
            .zip(available)
            .all(|(need, have)| need <= have)
    }
}

pub(crate) fn element_histogram(
    mol: &Molecule,
    atoms: impl IntoIterator<Item = usize>,
) -> [u16; Element::ALL.len()] {
    let mut counts = [0u16; Element::ALL.len()];
    for a in atoms {
        let e = mol.atom(a).element;
        let slot = Element::ALL
            .iter()
            .position(|&x| x == e)
            .expect("known element");
        counts[slot] += 1;
    }
    counts
}

/// A ranked motif vocabulary.
///
/// BBB vocabularies are ranked by (count desc, key asc); PSM vocabularies
/// keep mining order, so any prefix is the vocabulary a smaller run would
/// have produced.
#[derive(Debug, Clone)]
pub struct Vocabulary {
    scheme: VocabScheme,
    corpus_hash: String,
    entries: Vec<VocabEntry>,
    index: HashMap<MotifKey, usize>,
    /// Entry indices by (atom count desc, count desc, key asc).
    selection_order: Vec<usize>,
}

impl PartialEq for Vocabulary {
    fn eq(&self, other: &Self) -> bool {
        self.scheme == other.scheme
            && self.corpus_hash == other.corpus_hash
            && self.entries == other.entries
    }
}

impl Vocabulary {
    /// Assembles a vocabulary from ranked entries. Fails on duplicate keys.
    pub fn new(
        scheme: VocabScheme,
        corpus_hash: impl Into<String>,
        entries: Vec<VocabEntry>,
    ) -> Result<Vocabulary, VocabError> {
        let mut index = HashMap::with_capacity(entries.len());
        for (i, e) in entries.iter().enumerate() {
            if index.insert(e.key.clone(), i).is_some() {
                return Err(VocabError::DuplicateKey {
                    line: i + 1,
                    smiles: e.smiles.clone(),
                });
            }
        }
        let mut selection_order: Vec<usize> = (0..entries.len()).collect();
        selection_order.sort_by(|&a, &b| {
            let (x, y) = (&entries[a], &entries[b]);
            y.atom_count
                .cmp(&x.atom_count)
                .then(y.count.cmp(&x.count))
                .then_with(|| x.key.cmp(&y.key))
        });
        Ok(Vocabulary {
            scheme,
            corpus_hash: corpus_hash.into(),
            entries,
            index,
            selection_order,
        })
    }

    pub fn empty(scheme: VocabScheme) -> Vocabulary {
        Vocabulary::new(scheme, String::new(), Vec::new()).expect("no entries")
    }

    /// Vocabulary made of the given motif SMILES with explicit counts, in
    /// the given rank order. Convenient for tests and small experiments.
    pub fn from_smiles(
        scheme: VocabScheme,
        motifs: &[(&str, u64)],
    ) -> Result<Vocabulary, VocabError> {
        let entries = motifs
            .iter()
            .enumerate()
            .map(|(i, (smi, count))| {
                let mol = parse_smiles(smi).map_err(|source| VocabError::Smiles {
                    line: i + 1,
                    source,
                })?;
                Ok(VocabEntry::from_fragment(&mol, *count))
            })
            .collect::<Result<Vec<_>, VocabError>>()?;
        Vocabulary::new(scheme, String::new(), entries)
    }

    pub fn scheme(&self) -> VocabScheme {
        self.scheme
    }

    pub fn corpus_hash(&self) -> &str {
        &self.corpus_hash
    }

    pub fn entries(&self) -> &[VocabEntry] {
        &self.entries
    }

    /// Number of motifs, `k`.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, key: &MotifKey) -> Option<&VocabEntry> {
        self.index.get(key).map(|&i| &self.entries[i])
    }

    pub fn contains(&self, key: &MotifKey) -> bool {
        self.index.contains_key(key)
    }

    /// Entries in FindMInF preference order: larger first, then more
    /// frequent, then smaller key.
    pub fn by_preference(&self) -> impl Iterator<Item = &VocabEntry> {
        self.selection_order.iter().map(|&i| &self.entries[i])
    }

    /// The first `k` entries as a vocabulary of their own.
    pub fn truncated(&self, k: usize) -> Vocabulary {
        let entries = self.entries.iter().take(k).cloned().collect();
        Vocabulary::new(self.scheme, self.corpus_hash.clone(), entries)
            .expect("prefix of unique keys")
    }
}
