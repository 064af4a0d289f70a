//! Vocabulary file format.
//!
//! ```text
//! # optional comment lines
//! {"format_version":1,"scheme":"bbb","corpus_hash":"…","k":2}
//! 1	C1CCCCC1	2	6	1
//! 2	CCO	1	3	0
//! ```
//!
//! The header is a single JSON object; every entry line holds rank,
//! canonical SMILES, count, atom count and a 0/1 ring flag, tab separated.

use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{VocabEntry, VocabError, VocabScheme, Vocabulary};
use crate::smiles::parse_smiles;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VocabHeader {
    pub format_version: u32,
    pub scheme: VocabScheme,
    pub corpus_hash: String,
    pub k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config_fingerprint: Option<String>,
}

pub fn write_vocab(
    vocab: &Vocabulary,
    config_fingerprint: Option<&str>,
    mut out: impl Write,
) -> std::io::Result<()> {
    let header = VocabHeader {
        format_version: FORMAT_VERSION,
        scheme: vocab.scheme(),
        corpus_hash: vocab.corpus_hash().to_string(),
        k: vocab.len(),
        config_fingerprint: config_fingerprint.map(str::to_string),
    };
    writeln!(
        out,
        "{}",
        serde_json::to_string(&header).expect("header serializes")
    )?;
    for (rank, e) in vocab.entries().iter().enumerate() {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            rank + 1,
            e.smiles,
            e.count,
            e.atom_count,
            u8::from(e.has_ring)
        )?;
    }
    Ok(())
}

pub fn save_vocab(vocab: &Vocabulary, path: impl AsRef<Path>) -> Result<(), VocabError> {
    let mut buf = Vec::new();
    write_vocab(vocab, None, &mut buf)?;
    fs::write(path, buf)?;
    Ok(())
}

pub fn load_vocab(path: impl AsRef<Path>) -> Result<Vocabulary, VocabError> {
    let file = fs::File::open(path)?;
    read_vocab(BufReader::new(file)).map(|(v, _)| v)
}

/// Reads a vocabulary and its header.
pub fn read_vocab(input: impl Read) -> Result<(Vocabulary, VocabHeader), VocabError> {
    let reader = BufReader::new(input);
    let mut header: Option<VocabHeader> = None;
    let mut entries: Vec<VocabEntry> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let malformed = |message: String| VocabError::Malformed {
            line: line_no,
            message,
        };
        if header.is_none() {
            // Check the version before the strict parse so old or future
            // files report a version mismatch rather than a schema error.
            let value: serde_json::Value = serde_json::from_str(trimmed)
                .map_err(|e| malformed(format!("invalid header: {e}")))?;
            let found = value
                .get("format_version")
                .and_then(serde_json::Value::as_u64)
                .ok_or_else(|| malformed("header lacks format_version".into()))?;
            if found != FORMAT_VERSION as u64 {
                return Err(VocabError::VersionMismatch {
                    found: found as u32,
                    expected: FORMAT_VERSION,
                });
            }
            header = Some(
                serde_json::from_value(value)
                    .map_err(|e| malformed(format!("invalid header: {e}")))?,
            );
            continue;
        }
        let fields: Vec<&str> = trimmed.split('\t').collect();
        if fields.len() != 5 {
            return Err(malformed(format!(
                "expected 5 fields, found {}",
                fields.len()
            )));
        }
        let rank: usize = fields[0]
            .parse()
            .map_err(|_| malformed(format!("invalid rank `{}`", fields[0])))?;
        if rank != entries.len() + 1 {
            return Err(malformed(format!("rank {rank} out of sequence")));
        }
        let count: u64 = fields[2]
            .parse()
            .map_err(|_| malformed(format!("invalid count `{}`", fields[2])))?;
        if count == 0 {
            return Err(malformed("count must be positive".into()));
        }
        let atom_count: usize = fields[3]
            .parse()
            .map_err(|_| malformed(format!("invalid atom count `{}`", fields[3])))?;
        let has_ring = match fields[4] {
            "0" => false,
            "1" => true,
            other => return Err(malformed(format!("invalid ring flag `{other}`"))),
        };
        let mol = parse_smiles(fields[1]).map_err(|source| VocabError::Smiles {
            line: line_no,
            source,
        })?;
        let entry = VocabEntry::from_parsed(fields[1].to_string(), mol, count);
        if entry.atom_count != atom_count {
            return Err(malformed(format!(
                "atom count {atom_count} disagrees with SMILES ({})",
                entry.atom_count
            )));
        }
        if entry.atom_count < 2 {
            return Err(malformed("single-atom motifs are not allowed".into()));
        }
        if entry.has_ring != has_ring {
            return Err(malformed("ring flag disagrees with SMILES".into()));
        }
        if entries.iter().any(|e| e.key == entry.key) {
            return Err(VocabError::DuplicateKey {
                line: line_no,
                smiles: entry.smiles,
            });
        }
        entries.push(entry);
    }
    let header = header.ok_or(VocabError::Malformed {
        line: 0,
        message: "missing header".into(),
    })?;
    if header.k != entries.len() {
        return Err(VocabError::Malformed {
            line: 0,
            message: format!(
                "header declares k = {} but file has {} entries",
                header.k,
                entries.len()
            ),
        });
    }
    let vocab = Vocabulary::new(header.scheme, header.corpus_hash.clone(), entries)?;
    Ok((vocab, header))
}
