//! Corpus diagnostics: decomposition sizes, ring-size histograms and
//! vocabulary composition, with CSV emitters.
//!
//! Floats are printed with Rust's shortest round-trip formatting, so a CSV
//! written here parses back to bit-identical values.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::corpus::CorpusEntry;
use crate::fragmentation::{decompose, Scheme, SchemeMismatch};
use crate::rings::perceive_rings;
use crate::vocab::Vocabulary;

/// Per-molecule decomposition sizes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MoleculeStats {
    pub id: String,
    pub scheme: Scheme,
    pub atoms: usize,
    pub fragments: usize,
    pub motifs: usize,
    pub singles: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionStats {
    pub scheme: Scheme,
    pub records: Vec<MoleculeStats>,
}

impl DecompositionStats {
    pub fn molecules(&self) -> usize {
        self.records.len()
    }

    /// Mean |F|; zero for an empty corpus.
    pub fn mean_fragments(&self) -> f64 {
        if self.records.is_empty() {
            return 0.0;
        }
        let total: u64 = self.records.iter().map(|r| r.fragments as u64).sum();
        total as f64 / self.records.len() as f64
    }

    /// Mean |M|; zero for an empty corpus.
    pub fn mean_motifs(&self) -> f64 {
        if self.records.is_empty() {
            return 0.0;
        }
        let total: u64 = self.records.iter().map(|r| r.motifs as u64).sum();
        total as f64 / self.records.len() as f64
    }

    /// Median |F| (mean of the middle pair for even counts).
    pub fn median_fragments(&self) -> f64 {
        let mut sizes: Vec<usize> = self.records.iter().map(|r| r.fragments).collect();
        if sizes.is_empty() {
            return 0.0;
        }
        sizes.sort_unstable();
        let mid = sizes.len() / 2;
        if sizes.len() % 2 == 1 {
            sizes[mid] as f64
        } else {
            (sizes[mid - 1] + sizes[mid]) as f64 / 2.0
        }
    }

    /// Number of molecules per |F|.
    pub fn fragment_histogram(&self) -> BTreeMap<usize, usize> {
        let mut h = BTreeMap::new();
        for r in &self.records {
            *h.entry(r.fragments).or_insert(0) += 1;
        }
        h
    }

    /// Share of atoms left as single atoms.
    pub fn single_atom_rate(&self) -> f64 {
        let atoms: u64 = self.records.iter().map(|r| r.atoms as u64).sum();
        if atoms == 0 {
            return 0.0;
        }
        let singles: u64 = self.records.iter().map(|r| r.singles as u64).sum();
        singles as f64 / atoms as f64
    }
}

pub fn decomposition_stats(
    corpus: &[CorpusEntry],
    vocab: &Vocabulary,
    scheme: Scheme,
) -> Result<DecompositionStats, SchemeMismatch> {
    if !scheme.accepts(vocab.scheme()) {
        return Err(SchemeMismatch {
            scheme,
            vocab: vocab.scheme(),
        });
    }
    let records = corpus
        .par_iter()
        .map(|entry| {
            let d = decompose(&entry.molecule, vocab, scheme).expect("scheme checked above");
            MoleculeStats {
                id: entry.id.clone(),
                scheme,
                atoms: entry.molecule.atom_count(),
                fragments: d.cardinality(),
                motifs: d.motifs().len(),
                singles: d.singles().len(),
            }
        })
        .collect();
    Ok(DecompositionStats { scheme, records })
}

pub const RING_MIN: usize = 3;
pub const RING_MAX: usize = 20;

/// Ring counts from each molecule's smallest-ring set, by ring size.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RingHistogram {
    pub molecules: usize,
    /// `counts[r - RING_MIN]` rings of size `r`.
    pub counts: [u64; RING_MAX - RING_MIN + 1],
    /// Rings larger than [`RING_MAX`].
    pub overflow: u64,
}

impl RingHistogram {
    /// Mean rings of size `size` per molecule.
    pub fn mean(&self, size: usize) -> f64 {
        if self.molecules == 0 || !(RING_MIN..=RING_MAX).contains(&size) {
            return 0.0;
        }
        self.counts[size - RING_MIN] as f64 / self.molecules as f64
    }

    pub fn overflow_mean(&self) -> f64 {
        if self.molecules == 0 {
            return 0.0;
        }
        self.overflow as f64 / self.molecules as f64
    }

    fn add(mut self, other: RingHistogram) -> RingHistogram {
        self.molecules += other.molecules;
        for (a, b) in self.counts.iter_mut().zip(other.counts) {
            *a += b;
        }
        self.overflow += other.overflow;
        self
    }
}

pub fn ring_histogram(corpus: &[CorpusEntry]) -> RingHistogram {
    corpus
        .par_iter()
        .map(|entry| {
            let mut h = RingHistogram {
                molecules: 1,
                ..RingHistogram::default()
            };
            for ring in perceive_rings(&entry.molecule).rings {
                match ring.size() {
                    s if s > RING_MAX => h.overflow += 1,
                    s => h.counts[s - RING_MIN] += 1,
                }
            }
            h
        })
        .reduce(RingHistogram::default, RingHistogram::add)
}

#[derive(Debug, Clone, PartialEq)]
pub struct VocabComposition {
    pub k: usize,
    pub ring_motifs: usize,
    pub ring_motif_fraction: f64,
    /// Number of motifs per atom count.
    pub size_distribution: BTreeMap<usize, usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("vocabulary is empty")]
pub struct EmptyVocabulary;

pub fn vocab_composition(vocab: &Vocabulary) -> Result<VocabComposition, EmptyVocabulary> {
    if vocab.is_empty() {
        return Err(EmptyVocabulary);
    }
    let ring_motifs = vocab.entries().iter().filter(|e| e.has_ring).count();
    let mut size_distribution = BTreeMap::new();
    for e in vocab.entries() {
        *size_distribution.entry(e.atom_count).or_insert(0) += 1;
    }
    Ok(VocabComposition {
        k: vocab.len(),
        ring_motifs,
        ring_motif_fraction: ring_motifs as f64 / vocab.len() as f64,
        size_distribution,
    })
}

/// `id,scheme,atoms,fragments,motifs,singles`, one row per molecule.
pub fn records_csv(stats: &DecompositionStats) -> String {
    let mut out = String::from("id,scheme,atoms,fragments,motifs,singles\n");
    for r in &stats.records {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            csv_field(&r.id),
            r.scheme,
            r.atoms,
            r.fragments,
            r.motifs,
            r.singles
        )
        .unwrap();
    }
    out
}

pub const SUMMARY_HEADER: &str =
    "scheme,molecules,mean_fragments,median_fragments,mean_motifs,single_atom_rate";

/// One summary row (no header) in [`SUMMARY_HEADER`] layout.
pub fn summary_row(stats: &DecompositionStats) -> String {
    format!(
        "{},{},{:?},{:?},{:?},{:?}",
        stats.scheme,
        stats.molecules(),
        stats.mean_fragments(),
        stats.median_fragments(),
        stats.mean_motifs(),
        stats.single_atom_rate()
    )
}

/// Side-by-side summary of several schemes on the same corpus.
pub fn summary_csv(all: &[DecompositionStats]) -> String {
    let mut out = format!("{SUMMARY_HEADER}\n");
    for s in all {
        out.push_str(&summary_row(s));
        out.push('\n');
    }
    out
}

/// `fragments,molecules`.
pub fn fragment_histogram_csv(stats: &DecompositionStats) -> String {
    let mut out = String::from("fragments,molecules\n");
    for (size, n) in stats.fragment_histogram() {
        writeln!(out, "{size},{n}").unwrap();
    }
    out
}

/// `ring_size,rings,mean_per_molecule` for sizes 3..=20, then `>20`.
pub fn ring_histogram_csv(h: &RingHistogram) -> String {
    let mut out = String::from("ring_size,rings,mean_per_molecule\n");
    for size in RING_MIN..=RING_MAX {
        writeln!(
            out,
            "{size},{},{:?}",
            h.counts[size - RING_MIN],
            h.mean(size)
        )
        .unwrap();
    }
    writeln!(out, ">{RING_MAX},{},{:?}", h.overflow, h.overflow_mean()).unwrap();
    out
}

/// `atom_count,motifs` rows followed by a `ring_motif_fraction` row.
pub fn vocab_composition_csv(c: &VocabComposition) -> String {
    let mut out = String::from("atom_count,motifs\n");
    for (size, n) in &c.size_distribution {
        writeln!(out, "{size},{n}").unwrap();
    }
    writeln!(out, "ring_motif_fraction,{:?}", c.ring_motif_fraction).unwrap();
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
