//! SMILES reading and canonical writing.
//!
//! The accepted dialect is the organic subset plus bracket atoms, ring
//! closures (`1`..`9`, `%nn`), branches and the bond symbols `- = # :`.
//! Stereo markers are accepted and dropped. Aromatic input is kekulized
//! during parsing, so a [`Molecule`](crate::Molecule) only ever holds single,
//! double and triple bonds.

mod kekulize;
mod parser;
mod writer;

pub use parser::parse_smiles;
pub use writer::write_smiles;

use crate::molecule::MoleculeError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SmilesError {
    #[error("empty SMILES")]
    Empty,
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unsupported element `{symbol}` at position {position}")]
    UnsupportedElement { position: usize, symbol: String },
    #[error("isotope labels are not supported (position {position})")]
    Isotope { position: usize },
    #[error("multi-component SMILES ('.') at position {position}")]
    MultiComponent { position: usize },
    #[error("ring bond {label} opened at position {position} is never closed")]
    UnclosedRing { position: usize, label: u32 },
    #[error("cannot kekulize aromatic system containing atoms {atoms:?}")]
    Kekulize { atoms: Vec<usize> },
    #[error("valence violation: {0}")]
    Valence(MoleculeError),
}

impl SmilesError {
    /// Byte offset of the offending token, where one exists.
    pub fn position(&self) -> Option<usize> {
        match self {
            SmilesError::Syntax { position, .. }
            | SmilesError::UnsupportedElement { position, .. }
            | SmilesError::Isotope { position }
            | SmilesError::MultiComponent { position }
            | SmilesError::UnclosedRing { position, .. } => Some(*position),
            _ => None,
        }
    }
}
