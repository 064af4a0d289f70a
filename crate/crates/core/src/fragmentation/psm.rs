use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use crate::canon::{canonical_key_unchecked, MotifKey};
use crate::molecule::Molecule;
use crate::vocab::Vocabulary;

use super::{check_scheme, Decomposition, Motif, Scheme, SchemeMismatch};

/// Working partition of one molecule during PSM merging.
///
/// A fragment is identified by its smallest atom. Every pair of adjacent
/// fragments carries the charge-sensitive key of their union, so iterating
/// `pairs` in map order is a left-to-right scan by smallest atom.
#[derive(Debug, Clone)]
pub(crate) struct MergeState {
    owner: Vec<usize>,
    members: Vec<Vec<usize>>,
    pairs: BTreeMap<(usize, usize), MotifKey>,
}

impl MergeState {
    /// All atoms as single fragments.
    pub(crate) fn new(mol: &Molecule) -> MergeState {
        let n = mol.atom_count();
        let mut state = MergeState {
            owner: (0..n).collect(),
            members: (0..n).map(|a| vec![a]).collect(),
            pairs: BTreeMap::new(),
        };
        for bond in mol.bonds() {
            let key = state.union_key(mol, bond.a, bond.b);
            state.pairs.insert((bond.a, bond.b), key);
        }
        state
    }

    pub(crate) fn pairs(&self) -> impl Iterator<Item = (&(usize, usize), &MotifKey)> {
        self.pairs.iter()
    }

    /// Current fragments, ordered by smallest atom.
    pub(crate) fn fragments(&self) -> impl Iterator<Item = &[usize]> {
        self.members
            .iter()
            .filter(|m| !m.is_empty())
            .map(Vec::as_slice)
    }

    pub(crate) fn union(&self, f: usize, g: usize) -> Vec<usize> {
        let mut atoms: Vec<usize> = self.members[f]
            .iter()
            .chain(&self.members[g])
            .copied()
            .collect();
        atoms.sort_unstable();
        atoms
    }

    fn union_key(&self, mol: &Molecule, f: usize, g: usize) -> MotifKey {
        canonical_key_unchecked(&mol.induced(&self.union(f, g)), true)
    }

    /// Merges fragments `f` and `g` (which must be adjacent). Keys of pairs
    /// that disappear are pushed to `removed`, keys of new pairs to `added`.
    pub(crate) fn merge(
        &mut self,
        mol: &Molecule,
        f: usize,
        g: usize,
        removed: &mut Vec<MotifKey>,
        added: &mut Vec<MotifKey>,
    ) {
        let (lo, hi) = if f < g { (f, g) } else { (g, f) };
        let stale: Vec<(usize, usize)> = self
            .pairs
            .keys()
            .filter(|&&(a, b)| a == lo || a == hi || b == lo || b == hi)
            .copied()
            .collect();
        for p in stale {
            removed.push(self.pairs.remove(&p).expect("pair present"));
        }
        let moved = std::mem::take(&mut self.members[hi]);
        for &a in &moved {
            self.owner[a] = lo;
        }
        self.members[lo].extend(moved);
        self.members[lo].sort_unstable();

        let neighbours: BTreeSet<usize> = self.members[lo]
            .iter()
            .flat_map(|&a| mol.neighbors(a).iter().map(|&(nb, _)| self.owner[nb]))
            .filter(|&o| o != lo)
            .collect();
        for nb in neighbours {
            let key = self.union_key(mol, lo, nb);
            added.push(key.clone());
            self.pairs.insert((lo.min(nb), lo.max(nb)), key);
        }
    }

    /// One left-to-right pass merging every pair whose union has `key`.
    /// Pairs that overlap an earlier merge in the same pass are skipped.
    pub(crate) fn merge_all(
        &mut self,
        mol: &Molecule,
        key: &MotifKey,
        removed: &mut Vec<MotifKey>,
        added: &mut Vec<MotifKey>,
    ) -> usize {
        let hits: Vec<(usize, usize)> = self
            .pairs
            .iter()
            .filter(|(_, k)| *k == key)
            .map(|(&p, _)| p)
            .collect();
        let mut touched = BTreeSet::new();
        let mut merged = 0;
        for (f, g) in hits {
            if touched.contains(&f) || touched.contains(&g) {
                continue;
            }
            touched.insert(f);
            touched.insert(g);
            self.merge(mol, f, g, removed, added);
            merged += 1;
        }
        merged
    }
}

/// Greedy PSM decomposition: starting from single atoms, repeatedly merge
/// the adjacent pair whose union is the most frequent vocabulary motif.
/// Ties go to the smaller key, then to the smaller union atom list.
pub fn psm_decompose(mol: &Molecule, vocab: &Vocabulary) -> Result<Decomposition, SchemeMismatch> {
    check_scheme(Scheme::Psm, vocab)?;
    let mut state = MergeState::new(mol);
    let (mut removed, mut added) = (Vec::new(), Vec::new());
    loop {
        let mut best: Option<((usize, usize), u64, &MotifKey)> = None;
        for (&pair, key) in state.pairs() {
            let Some(entry) = vocab.get(key) else {
                continue;
            };
            let better = match best {
                None => true,
                Some((bp, bc, bk)) => match entry.count.cmp(&bc).then_with(|| bk.cmp(key)) {
                    Ordering::Greater => true,
                    Ordering::Less => false,
                    Ordering::Equal => state.union(pair.0, pair.1) < state.union(bp.0, bp.1),
                },
            };
            if better {
                best = Some((pair, entry.count, &entry.key));
            }
        }
        let Some(((f, g), _, _)) = best else { break };
        state.merge(mol, f, g, &mut removed, &mut added);
        removed.clear();
        added.clear();
    }
    let mut motifs = Vec::new();
    let mut singles = Vec::new();
    for frag in state.fragments() {
        if frag.len() == 1 {
            singles.push(frag[0]);
        } else {
            motifs.push(Motif {
                atoms: frag.to_vec(),
                key: canonical_key_unchecked(&mol.induced(frag), true),
            });
        }
    }
    Ok(Decomposition::from_parts(mol, Scheme::Psm, motifs, singles))
}
