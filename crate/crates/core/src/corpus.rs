//! Line-oriented SMILES corpora.
//!
//! One molecule per line: the SMILES, optionally followed by whitespace and
//! an identifier. Blank lines and lines starting with `#` are ignored.
//! Molecules without an identifier are named after their line number.

use std::io::BufRead;

use rand::seq::SliceRandom;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::molecule::Molecule;
use crate::smiles::{parse_smiles, SmilesError};

#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub id: String,
    /// 1-based line number in the source file.
    pub line: usize,
    pub molecule: Molecule,
}

impl CorpusEntry {
    pub fn new(id: impl Into<String>, molecule: Molecule) -> CorpusEntry {
        CorpusEntry {
            id: id.into(),
            line: 0,
            molecule,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("line {line}: {source}")]
    Parse {
        line: usize,
        #[source]
        source: SmilesError,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Parsed corpus plus the lines skipped in lenient mode.
#[derive(Debug, Default)]
pub struct Corpus {
    pub entries: Vec<CorpusEntry>,
    pub skipped: Vec<(usize, SmilesError)>,
}

impl Corpus {
    pub fn molecules(&self) -> Vec<Molecule> {
        self.entries.iter().map(|e| e.molecule.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// The data lines of a corpus as (line number, SMILES, id) triples.
pub fn corpus_lines(input: impl BufRead) -> std::io::Result<Vec<(usize, String, String)>> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut parts = trimmed.splitn(2, char::is_whitespace);
        let smiles = parts.next().unwrap_or_default().to_string();
        let id = parts
            .next()
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(str::to_string)
            .unwrap_or_else(|| (i + 1).to_string());
        out.push((i + 1, smiles, id));
    }
    Ok(out)
}

/// Reads and parses a corpus in parallel, keeping input order. With
/// `skip_invalid` unparsable lines are collected in `skipped`; otherwise
/// the first one (by line number) is returned as an error.
pub fn read_corpus(input: impl BufRead, skip_invalid: bool) -> Result<Corpus, CorpusError> {
    let lines = corpus_lines(input)?;
    let parsed: Vec<(usize, String, Result<Molecule, SmilesError>)> = lines
        .into_par_iter()
        .map(|(line, smiles, id)| {
            let mol = parse_smiles(&smiles).map(|m| m.with_source(smiles));
            (line, id, mol)
        })
        .collect();
    let mut corpus = Corpus::default();
    for (line, id, result) in parsed {
        match result {
            Ok(molecule) => corpus.entries.push(CorpusEntry { id, line, molecule }),
            Err(source) if skip_invalid => corpus.skipped.push((line, source)),
            Err(source) => return Err(CorpusError::Parse { line, source }),
        }
    }
    Ok(corpus)
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SplitError {
    #[error("split ratios must be finite and non-negative")]
    Negative,
    #[error("split ratios sum to {0}, not 1")]
    Sum(f64),
}

/// Seeded random train/validation/test split of `n` items. Returns the item
/// indices of each part in ascending order; the parts partition `0..n`.
/// The first two parts get `floor(n * ratio)` items, the third the rest.
pub fn split_indices(n: usize, ratios: [f64; 3], seed: u64) -> Result<[Vec<usize>; 3], SplitError> {
    if ratios.iter().any(|r| !r.is_finite() || *r < 0.0) {
        return Err(SplitError::Negative);
    }
    let sum: f64 = ratios.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(SplitError::Sum(sum));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let first = ((n as f64 * ratios[0]).floor() as usize).min(n);
    let second = ((n as f64 * ratios[1]).floor() as usize).min(n - first);
    let mut parts = [
        order[..first].to_vec(),
        order[first..first + second].to_vec(),
        order[first + second..].to_vec(),
    ];
    for p in &mut parts {
        p.sort_unstable();
    }
    Ok(parts)
}
