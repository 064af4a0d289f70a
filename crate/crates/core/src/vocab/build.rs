use std::collections::{HashMap, HashSet};

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use super::{VocabEntry, VocabError, VocabScheme, Vocabulary};
use crate::canon::MotifKey;
use crate::fragmentation::{bbb_fragment, MergeState};
use crate::molecule::Molecule;
use crate::smiles::write_smiles;

/// Smallest BBB fragment admitted to a vocabulary.
pub const BBB_MIN_ATOMS: usize = 3;

/// SHA-256 over the corpus, one molecule per line. Uses the original SMILES
/// when the molecule carries it, else the canonical SMILES.
pub fn corpus_hash(corpus: &[Molecule]) -> String {
    let mut hasher = Sha256::new();
    for mol in corpus {
        match mol.source() {
            Some(s) => hasher.update(s.as_bytes()),
            None => hasher.update(write_smiles(mol).as_bytes()),
        }
        hasher.update(b"\n");
    }
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Occurrence count plus the earliest (molecule, atoms) seen for a key.
struct Tally {
    count: u64,
    first: (usize, Vec<usize>),
}

fn merge_tables(
    mut a: HashMap<MotifKey, Tally>,
    b: HashMap<MotifKey, Tally>,
) -> HashMap<MotifKey, Tally> {
    for (key, t) in b {
        match a.get_mut(&key) {
            Some(cur) => {
                cur.count += t.count;
                if t.first < cur.first {
                    cur.first = t.first;
                }
            }
            None => {
                a.insert(key, t);
            }
        }
    }
    a
}

/// Every eligible BBB motif of the corpus with its occurrence count, ranked
/// by (count desc, key asc). Not truncated.
pub fn bbb_motif_counts(corpus: &[Molecule]) -> Vec<VocabEntry> {
    let table = corpus
        .par_iter()
        .enumerate()
        .map(|(i, mol)| {
            let mut local: HashMap<MotifKey, Tally> = HashMap::new();
            for frag in bbb_fragment(mol) {
                if frag.len() < BBB_MIN_ATOMS {
                    continue;
                }
                local
                    .entry(frag.key(mol, true))
                    .or_insert_with(|| Tally {
                        count: 0,
                        first: (i, frag.atoms().to_vec()),
                    })
                    .count += 1;
            }
            local
        })
        .reduce(HashMap::new, merge_tables);
    let mut ranked: Vec<(MotifKey, Tally)> = table.into_iter().collect();
    ranked.sort_by(|(ka, ta), (kb, tb)| tb.count.cmp(&ta.count).then_with(|| ka.cmp(kb)));
    ranked
        .into_par_iter()
        .map(|(_, t)| {
            let (mol_idx, atoms) = &t.first;
            VocabEntry::from_fragment(&corpus[*mol_idx].induced(atoms), t.count)
        })
        .collect()
}

/// Top-`k` BBB fragments (at least three atoms) by occurrence count.
pub fn bbb_build_vocab(corpus: &[Molecule], k: usize) -> Result<Vocabulary, VocabError> {
    if corpus.is_empty() {
        return Err(VocabError::EmptyCorpus);
    }
    if k == 0 {
        return Err(VocabError::InvalidK);
    }
    let mut entries = bbb_motif_counts(corpus);
    if entries.len() < k {
        log::warn!(
            "only {} eligible BBB motifs in the corpus, fewer than k = {k}",
            entries.len()
        );
    }
    entries.truncate(k);
    Vocabulary::new(VocabScheme::Bbb, corpus_hash(corpus), entries)
}

/// Mines `k` motifs by iterative merging. Each round counts, over the whole
/// corpus, the unions of adjacent fragment pairs, adds the most frequent new
/// union (ties: smaller key) with that count, and merges its occurrences
/// left to right in every molecule.
pub fn psm_build_vocab(corpus: &[Molecule], k: usize) -> Result<Vocabulary, VocabError> {
    if corpus.is_empty() {
        return Err(VocabError::EmptyCorpus);
    }
    if k == 0 {
        return Err(VocabError::InvalidK);
    }
    let mut states: Vec<MergeState> = corpus.par_iter().map(MergeState::new).collect();
    let mut counts: HashMap<MotifKey, u64> = states
        .par_iter()
        .map(|st| {
            let mut local = HashMap::new();
            for (_, key) in st.pairs() {
                *local.entry(key.clone()).or_insert(0u64) += 1;
            }
            local
        })
        .reduce(HashMap::new, |mut a, b| {
            for (key, c) in b {
                *a.entry(key).or_insert(0) += c;
            }
            a
        });
    let mut mined: HashSet<MotifKey> = HashSet::new();
    let mut entries = Vec::with_capacity(k);
    while entries.len() < k {
        let best = counts
            .iter()
            .filter(|(key, &c)| c > 0 && !mined.contains(*key))
            .max_by(|(ka, ca), (kb, cb)| ca.cmp(cb).then_with(|| kb.cmp(ka)));
        let Some((key, &count)) = best else {
            log::warn!(
                "corpus ran out of mergeable pairs after {} motifs, fewer than k = {k}",
                entries.len()
            );
            break;
        };
        let key = key.clone();
        let (mol_idx, atoms) = states
            .iter()
            .enumerate()
            .find_map(|(i, st)| {
                st.pairs()
                    .find(|(_, k)| **k == key)
                    .map(|(&(f, g), _)| (i, st.union(f, g)))
            })
            .expect("counted key occurs in the corpus");
        let entry = VocabEntry::from_fragment(&corpus[mol_idx].induced(&atoms), count);
        debug_assert_eq!(entry.key, key);
        log::debug!("mined motif {} ({} occurrences)", entry.smiles, count);
        entries.push(entry);

        let deltas: Vec<(Vec<MotifKey>, Vec<MotifKey>)> = states
            .par_iter_mut()
            .zip(corpus.par_iter())
            .map(|(st, mol)| {
                let (mut removed, mut added) = (Vec::new(), Vec::new());
                st.merge_all(mol, &key, &mut removed, &mut added);
                (removed, added)
            })
            .collect();
        // Additions first: a later merge in the same pass may remove a pair
        // that an earlier merge created.
        for (removed, added) in deltas {
            for a in added {
                *counts.entry(a).or_insert(0) += 1;
            }
            for r in removed {
                let c = counts.get_mut(&r).expect("removed pair was counted");
                *c -= 1;
                if *c == 0 {
                    counts.remove(&r);
                }
            }
        }
        mined.insert(key);
    }
    Vocabulary::new(VocabScheme::Psm, corpus_hash(corpus), entries)
}
