//! Brute-force oracles and generators shared by the integration tests.
//!
//! Nothing here calls the library's matcher, canonical labeling or merge
//! bookkeeping; the oracles work from the raw graph.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

use fragmol::assemble::{Candidate, ScoredBondGraph};
use fragmol::canon::{canonical_key, MotifKey};
use fragmol::fragmentation::bbb_fragment;
use fragmol::molecule::BondOrder;
use fragmol::molecule::{Atom, Bond, Molecule};
use fragmol::smiles::{parse_smiles, write_smiles};
use fragmol::synth::{random_corpus, random_molecule, SynthConfig};
use fragmol::vocab::{VocabEntry, VocabScheme, Vocabulary};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn corpus(seed: u64, n: usize, max_atoms: usize) -> Vec<Molecule> {
    random_corpus(
        seed,
        n,
        &SynthConfig {
            max_atoms,
            ..SynthConfig::default()
        },
    )
}

/// `perm[i]` is the new index of atom `i`.
pub fn permute(mol: &Molecule, perm: &[usize]) -> Molecule {
    let mut atoms = vec![mol.atom(0); mol.atom_count()];
    for (i, &p) in perm.iter().enumerate() {
        atoms[p] = mol.atom(i);
    }
    let mut bonds: Vec<Bond> = mol
        .bonds()
        .iter()
        .map(|b| Bond::new(perm[b.a], perm[b.b], b.order))
        .collect();
    bonds.sort();
    Molecule::new(atoms, bonds).unwrap()
}

pub fn random_perm(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

fn label(a: Atom, charge_sensitive: bool) -> (fragmol::Element, i8) {
    (a.element, if charge_sensitive { a.charge } else { 0 })
}

fn order_between(mol: &Molecule, u: usize, v: usize) -> Option<u8> {
    mol.bonds()
        .iter()
        .find(|b| (b.a == u && b.b == v) || (b.a == v && b.b == u))
        .map(|b| b.order.value())
}

/// Exhaustive isomorphism test: extends a bijection atom by atom, checking
/// labels and every bond/non-bond against earlier atoms.
pub fn isomorphic(a: &Molecule, b: &Molecule, charge_sensitive: bool) -> bool {
    if a.atom_count() != b.atom_count() || a.bond_count() != b.bond_count() {
        return false;
    }
    let mut la: Vec<_> = a
        .atoms()
        .iter()
        .map(|&x| label(x, charge_sensitive))
        .collect();
    let mut lb: Vec<_> = b
        .atoms()
        .iter()
        .map(|&x| label(x, charge_sensitive))
        .collect();
    la.sort();
    lb.sort();
    if la != lb {
        return false;
    }
    let mut map = Vec::new();
    let mut used = vec![false; b.atom_count()];
    extend_iso(a, b, charge_sensitive, &mut map, &mut used)
}

fn extend_iso(
    a: &Molecule,
    b: &Molecule,
    cs: bool,
    map: &mut Vec<usize>,
    used: &mut [bool],
) -> bool {
    let i = map.len();
    if i == a.atom_count() {
        return true;
    }
    for t in 0..b.atom_count() {
        if used[t] || label(a.atom(i), cs) != label(b.atom(t), cs) || a.degree(i) != b.degree(t) {
            continue;
        }
        if (0..i).all(|j| order_between(a, i, j) == order_between(b, t, map[j])) {
            map.push(t);
            used[t] = true;
            if extend_iso(a, b, cs, map, used) {
                return true;
            }
            used[t] = false;
            map.pop();
        }
    }
    false
}

/// Lexicographically smallest induced embedding of `pattern` into the
/// `allowed` atoms of `target`, found by plain enumeration over all target
/// atoms in index order.
pub fn brute_embedding(
    pattern: &Molecule,
    target: &Molecule,
    allowed: &[usize],
    charge_sensitive: bool,
) -> Option<Vec<usize>> {
    fn rec(p: &Molecule, t: &Molecule, allowed: &[usize], cs: bool, map: &mut Vec<usize>) -> bool {
        let i = map.len();
        if i == p.atom_count() {
            return true;
        }
        for &c in allowed {
            if map.contains(&c) || label(p.atom(i), cs) != label(t.atom(c), cs) {
                continue;
            }
            if (0..i).all(|j| order_between(p, i, j) == order_between(t, c, map[j])) {
                map.push(c);
                if rec(p, t, allowed, cs, map) {
                    return true;
                }
                map.pop();
            }
        }
        false
    }
    let mut sorted = allowed.to_vec();
    sorted.sort_unstable();
    let mut map = Vec::new();
    rec(pattern, target, &sorted, charge_sensitive, &mut map).then_some(map)
}

/// Grows a random connected atom set of (up to) `size` atoms.
pub fn random_connected(rng: &mut ChaCha8Rng, mol: &Molecule, size: usize) -> Vec<usize> {
    let start = rng.gen_range(0..mol.atom_count());
    let mut set = BTreeSet::from([start]);
    while set.len() < size {
        let frontier: Vec<usize> = set
            .iter()
            .flat_map(|&a| mol.neighbors(a).iter().map(|&(n, _)| n))
            .filter(|n| !set.contains(n))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let Some(&next) = frontier.choose(rng) else {
            break;
        };
        set.insert(next);
    }
    set.into_iter().collect()
}

/// Random vocabulary of up to `max` motifs cut from `source` molecules:
/// random connected pieces of 2 to 6 atoms plus some whole BBB fragments,
/// with random counts.
pub fn random_vocab(
    rng: &mut ChaCha8Rng,
    source: &[Molecule],
    max: usize,
    scheme: VocabScheme,
) -> Vocabulary {
    let mut entries: Vec<VocabEntry> = Vec::new();
    let mut keys = HashSet::new();
    let target = rng.gen_range(1..=max);
    let mut attempts = 0;
    while entries.len() < target && attempts < 50 * max {
        attempts += 1;
        let mol = source.choose(rng).unwrap();
        if mol.atom_count() < 2 {
            continue;
        }
        let atoms = if rng.gen_bool(0.3) {
            let frags = bbb_fragment(mol);
            frags.choose(rng).unwrap().atoms().to_vec()
        } else {
            let size = rng.gen_range(2..=6);
            random_connected(rng, mol, size)
        };
        if atoms.len() < 2 {
            continue;
        }
        let frag = mol.induced(&atoms);
        let entry = VocabEntry::from_fragment(&frag, rng.gen_range(1..=50));
        if keys.insert(entry.key.clone()) {
            entries.push(entry);
        }
    }
    Vocabulary::new(scheme, "", entries).unwrap()
}

/// Bridge flags by deleting each bond and searching for another path.
pub fn bridges_by_search(mol: &Molecule) -> Vec<bool> {
    (0..mol.bond_count())
        .map(|i| {
            let b = mol.bond(i);
            let rest = mol.without_bonds(&[i]);
            let mut seen = vec![false; mol.atom_count()];
            let mut stack = vec![b.a];
            seen[b.a] = true;
            while let Some(v) = stack.pop() {
                for &(n, _) in rest.neighbors(v) {
                    if !seen[n] {
                        seen[n] = true;
                        stack.push(n);
                    }
                }
            }
            !seen[b.b]
        })
        .collect()
}

/// Every simple cycle as a sorted bond list.
pub fn simple_cycles(mol: &Molecule) -> Vec<Vec<usize>> {
    let mut found = BTreeSet::new();
    fn dfs(
        mol: &Molecule,
        start: usize,
        v: usize,
        on_path: &mut Vec<bool>,
        path_bonds: &mut Vec<usize>,
        found: &mut BTreeSet<Vec<usize>>,
    ) {
        for &(n, b) in mol.neighbors(v) {
            if n == start && path_bonds.len() >= 2 && !path_bonds.contains(&b) {
                let mut cyc = path_bonds.clone();
                cyc.push(b);
                cyc.sort_unstable();
                found.insert(cyc);
            } else if n > start && !on_path[n] {
                on_path[n] = true;
                path_bonds.push(b);
                dfs(mol, start, n, on_path, path_bonds, found);
                path_bonds.pop();
                on_path[n] = false;
            }
        }
    }
    for start in 0..mol.atom_count() {
        let mut on_path = vec![false; mol.atom_count()];
        on_path[start] = true;
        dfs(mol, start, start, &mut on_path, &mut Vec::new(), &mut found);
    }
    found.into_iter().collect()
}

/// Sizes of a minimum cycle basis: shortest cycles first, kept when
/// independent over GF(2) of those already kept.
pub fn minimum_basis_sizes(mol: &Molecule) -> Vec<usize> {
    let mut cycles = simple_cycles(mol);
    cycles.sort_by_key(|c| c.len());
    let mut basis: Vec<Vec<bool>> = Vec::new();
    let mut sizes = Vec::new();
    for c in cycles {
        let mut v = vec![false; mol.bond_count()];
        for &b in &c {
            v[b] = true;
        }
        for row in &basis {
            let pivot = row.iter().position(|&x| x).unwrap();
            if v[pivot] {
                for (x, &y) in v.iter_mut().zip(row) {
                    *x ^= y;
                }
            }
        }
        if v.iter().any(|&x| x) {
            // Keep rows in reduced form so pivots stay unique.
            let pivot = v.iter().position(|&x| x).unwrap();
            for row in basis.iter_mut() {
                if row[pivot] {
                    for (x, &y) in row.iter_mut().zip(&v) {
                        *x ^= y;
                    }
                }
            }
            basis.push(v);
            sizes.push(c.len());
        }
    }
    sizes
}

/// FindMInF by exhaustion: at each step test every vocabulary motif for
/// containment, pick the largest, then most frequent, then smallest key,
/// and take its smallest embedding. Components of the remainder are
/// handled in order of their smallest atom.
pub fn find_m_in_f_oracle(
    mol: &Molecule,
    atoms: &[usize],
    vocab: &Vocabulary,
) -> (Vec<(Vec<usize>, MotifKey)>, Vec<usize>) {
    let mut motifs = Vec::new();
    let mut singles = Vec::new();
    oracle_rec(mol, atoms.to_vec(), vocab, &mut motifs, &mut singles);
    singles.sort_unstable();
    (motifs, singles)
}

fn oracle_rec(
    mol: &Molecule,
    part: Vec<usize>,
    vocab: &Vocabulary,
    motifs: &mut Vec<(Vec<usize>, MotifKey)>,
    singles: &mut Vec<usize>,
) {
    let contained: Vec<(&VocabEntry, Vec<usize>)> = vocab
        .entries()
        .iter()
        .filter_map(|e| brute_embedding(&e.molecule, mol, &part, false).map(|m| (e, m)))
        .collect();
    let best = contained.into_iter().max_by(|(a, _), (b, _)| {
        a.atom_count
            .cmp(&b.atom_count)
            .then(a.count.cmp(&b.count))
            .then_with(|| b.key.cmp(&a.key))
    });
    let Some((entry, mut mapping)) = best else {
        singles.extend(part);
        return;
    };
    mapping.sort_unstable();
    let rest: Vec<usize> = part.into_iter().filter(|a| !mapping.contains(a)).collect();
    motifs.push((mapping, entry.key.clone()));
    for comp in mol.components_within(&rest) {
        oracle_rec(mol, comp, vocab, motifs, singles);
    }
}

/// PSM mining recomputed from scratch each round. Candidate unions are
/// grouped by exhaustive isomorphism; the canonical key is only used to
/// break count ties and to name the result.
pub fn psm_mine_oracle(corpus: &[Molecule], k: usize) -> Vec<(MotifKey, u64)> {
    // owner[m][a]: smallest atom of the fragment holding atom a.
    let mut owner: Vec<Vec<usize>> = corpus
        .iter()
        .map(|m| (0..m.atom_count()).collect())
        .collect();
    let mut mined: Vec<Molecule> = Vec::new();
    let mut out = Vec::new();
    while out.len() < k {
        let mut groups: Vec<(Molecule, u64)> = Vec::new();
        for (m, mol) in corpus.iter().enumerate() {
            for (f, g) in adjacent_pairs(mol, &owner[m]) {
                let union = mol.induced(&union_atoms(&owner[m], f, g));
                if mined.iter().any(|x| isomorphic(x, &union, true)) {
                    continue;
                }
                match groups
                    .iter_mut()
                    .find(|(rep, _)| isomorphic(rep, &union, true))
                {
                    Some((_, c)) => *c += 1,
                    None => groups.push((union, 1)),
                }
            }
        }
        let best = groups
            .into_iter()
            .map(|(rep, c)| (canonical_key(&rep, true).unwrap(), c, rep))
            .max_by(|a, b| a.1.cmp(&b.1).then_with(|| b.0.cmp(&a.0)));
        let Some((key, count, rep)) = best else { break };
        for (m, mol) in corpus.iter().enumerate() {
            let mut touched = HashSet::new();
            for (f, g) in adjacent_pairs(mol, &owner[m]) {
                if touched.contains(&f) || touched.contains(&g) {
                    continue;
                }
                let union = mol.induced(&union_atoms(&owner[m], f, g));
                if isomorphic(&rep, &union, true) {
                    touched.insert(f);
                    touched.insert(g);
                    let lo = f.min(g);
                    for o in owner[m].iter_mut() {
                        if *o == f || *o == g {
                            *o = lo;
                        }
                    }
                }
            }
        }
        mined.push(rep);
        out.push((key, count));
    }
    out
}

/// Adjacent fragment pairs (by smallest atom), sorted.
fn adjacent_pairs(mol: &Molecule, owner: &[usize]) -> Vec<(usize, usize)> {
    let set: BTreeSet<(usize, usize)> = mol
        .bonds()
        .iter()
        .filter(|b| owner[b.a] != owner[b.b])
        .map(|b| (owner[b.a].min(owner[b.b]), owner[b.a].max(owner[b.b])))
        .collect();
    set.into_iter().collect()
}

fn union_atoms(owner: &[usize], f: usize, g: usize) -> Vec<usize> {
    (0..owner.len())
        .filter(|&a| owner[a] == f || owner[a] == g)
        .collect()
}

/// Every atom within its charge-adjusted maximum valence.
pub fn valences_ok(mol: &Molecule) -> bool {
    (0..mol.atom_count()).all(|a| mol.bond_order_sum(a) <= mol.atom(a).max_valence())
}

pub fn molecule(seed: u64, max_atoms: usize) -> Molecule {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = random_molecule(
        &mut rng,
        &SynthConfig {
            max_atoms,
            ..SynthConfig::default()
        },
    );
    let s = write_smiles(&m);
    parse_smiles(&s).unwrap()
}

/// A random scored graph: motifs cut from a random molecule, candidates are
/// its inter bonds plus random extra pairs, all with random confidences.
pub fn scored_graph(seed: u64) -> ScoredBondGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mol = molecule(seed, 20);
    let mut owner: Vec<Option<usize>> = vec![None; mol.atom_count()];
    let mut motifs: Vec<(Vec<usize>, Vec<Bond>)> = Vec::new();
    for frag in bbb_fragment(&mol) {
        if frag.len() >= 2 && rng.gen_bool(0.7) {
            for &a in frag.atoms() {
                owner[a] = Some(motifs.len());
            }
            let bonds = mol
                .induced_bonds(frag.atoms())
                .into_iter()
                .map(|b| mol.bond(b))
                .collect();
            motifs.push((frag.atoms().to_vec(), bonds));
        }
    }
    let mut cands = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for b in mol.bonds() {
        if owner[b.a].is_none() || owner[b.a] != owner[b.b] {
            seen.insert((b.a.min(b.b), b.a.max(b.b), b.order));
            cands.push(Candidate::new(b.a, b.b, b.order, rng.gen()));
        }
    }
    let n = mol.atom_count();
    if n >= 2 {
        for _ in 0..rng.gen_range(0..2 * n) {
            let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
            if u == v || (owner[u].is_some() && owner[u] == owner[v]) {
                continue;
            }
            let order = *[
                BondOrder::Single,
                BondOrder::Single,
                BondOrder::Double,
                BondOrder::Triple,
            ]
            .choose(&mut rng)
            .unwrap();
            if seen.insert((u.min(v), u.max(v), order)) {
                cands.push(Candidate::new(u, v, order, rng.gen()));
            }
        }
    }
    ScoredBondGraph::new(mol.atoms().to_vec(), &motifs, cands).unwrap()
}
