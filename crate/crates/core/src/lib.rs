//! Molecular graph fragmentation into motif vocabularies.
//!
//! The crate parses SMILES into kekulized heavy-atom graphs, mines motif
//! vocabularies (BBB and PSM), decomposes molecules with the BBB, PSM and
//! Subcover schemes, and post-processes scored bond graphs.

pub mod assemble;
pub mod canon;
pub mod corpus;
pub mod element;
pub mod fragment;
pub mod fragmentation;
pub mod matching;
pub mod molecule;
pub mod record;
pub mod rings;
pub mod smiles;
pub mod stats;
pub mod synth;
pub mod vocab;

pub use canon::{canonical_key, subgraph_key, MotifKey};
pub use element::Element;
pub use fragment::Fragment;
pub use fragmentation::{decompose, Decomposition, Motif, Scheme, SchemeMismatch};
pub use molecule::{Atom, Bond, BondOrder, Molecule};
pub use rings::{perceive_rings, RingInfo};
pub use smiles::{parse_smiles, write_smiles, SmilesError};
pub use vocab::{VocabError, VocabScheme, Vocabulary};
