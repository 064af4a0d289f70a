mod common;

use common::*;
use fragmol::assemble::{
    assemble, cycle_break, cycle_violations, valency_correct, AssembleOrder, ScoredBondGraph,
};
use fragmol::canon::canonical_key;
use fragmol::corpus::CorpusEntry;
use fragmol::fragmentation::{bbb_fragment, decompose, psm_decompose, Scheme};
use fragmol::molecule::{Bond, Molecule};
use fragmol::rings::{bridges, perceive_rings};
use fragmol::smiles::{parse_smiles, write_smiles};
use fragmol::stats::{decomposition_stats, ring_histogram};
use fragmol::vocab::{bbb_build_vocab, psm_build_vocab, VocabScheme};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn canonical_key_ignores_atom_order(seed in any::<u64>(), perm_seed in any::<u64>()) {
        let mol = molecule(seed, 30);
        let perm = random_perm(&mut ChaCha8Rng::seed_from_u64(perm_seed), mol.atom_count());
        let other = permute(&mol, &perm);
        for cs in [false, true] {
            prop_assert_eq!(canonical_key(&mol, cs).unwrap(), canonical_key(&other, cs).unwrap());
        }
        prop_assert_eq!(write_smiles(&mol), write_smiles(&other));
    }

    #[test]
    fn key_equality_matches_isomorphism(a in any::<u64>(), b in any::<u64>()) {
        // Small molecules from a tiny alphabet so collisions are common.
        let x = molecule(a % 500, 7);
        let y = molecule(b % 500, 7);
        for cs in [false, true] {
            let same = canonical_key(&x, cs).unwrap() == canonical_key(&y, cs).unwrap();
            prop_assert_eq!(same, isomorphic(&x, &y, cs));
        }
    }

    #[test]
    fn smiles_round_trip(seed in any::<u64>()) {
        let mol = molecule(seed, 30);
        let text = write_smiles(&mol);
        let back = parse_smiles(&text).unwrap();
        prop_assert_eq!(canonical_key(&mol, true).unwrap(), canonical_key(&back, true).unwrap());
        prop_assert_eq!(write_smiles(&back), text);
        prop_assert!(valences_ok(&back));
    }

    #[test]
    fn ring_flags_match_search(seed in any::<u64>()) {
        let mol = molecule(seed, 30);
        let bridge = bridges(&mol);
        let oracle = bridges_by_search(&mol);
        prop_assert_eq!(&bridge, &oracle);
        let rings = perceive_rings(&mol);
        for (i, &b) in oracle.iter().enumerate() {
            prop_assert_eq!(rings.bond_in_ring[i], !b);
        }
    }

    #[test]
    fn ring_basis_size(seed in any::<u64>()) {
        let mol = molecule(seed, 30);
        let rings = perceive_rings(&mol);
        prop_assert_eq!(rings.ring_count() + mol.atom_count(), mol.bond_count() + 1);
    }

    #[test]
    fn ring_basis_is_minimal(seed in any::<u64>()) {
        let mol = molecule(seed, 14);
        let mut sizes: Vec<usize> = perceive_rings(&mol).rings.iter().map(|r| r.size()).collect();
        let mut oracle = minimum_basis_sizes(&mol);
        sizes.sort_unstable();
        oracle.sort_unstable();
        prop_assert_eq!(sizes, oracle);
    }

    #[test]
    fn every_scheme_partitions(seed in any::<u64>(), vseed in any::<u64>()) {
        let mol = molecule(seed, 30);
        let mut rng = ChaCha8Rng::seed_from_u64(vseed);
        let source = corpus(vseed, 20, 20);
        for (scheme, vs) in [
            (Scheme::Bbb, VocabScheme::Bbb),
            (Scheme::Psm, VocabScheme::Psm),
            (Scheme::Subcover, VocabScheme::Bbb),
        ] {
            let vocab = random_vocab(&mut rng, &source, 20, vs);
            let d = decompose(&mol, &vocab, scheme).unwrap();
            prop_assert!(d.validate(&mol).is_ok());
            let mut atoms: Vec<usize> = d.motifs().iter().flat_map(|m| m.atoms.clone()).chain(d.singles().iter().copied()).collect();
            atoms.sort_unstable();
            prop_assert_eq!(atoms, (0..mol.atom_count()).collect::<Vec<_>>());
            let mut bonds: Vec<usize> = d.intra_bonds().iter().chain(d.inter_bonds()).copied().collect();
            bonds.sort_unstable();
            prop_assert_eq!(bonds, (0..mol.bond_count()).collect::<Vec<_>>());
        }
    }

    #[test]
    fn bbb_keeps_rings_whole(seed in any::<u64>()) {
        let mol = molecule(seed, 30);
        let frags = bbb_fragment(&mol);
        let mut owner = vec![usize::MAX; mol.atom_count()];
        for (i, f) in frags.iter().enumerate() {
            for &a in f.atoms() {
                owner[a] = i;
            }
        }
        for ring in perceive_rings(&mol).rings {
            prop_assert!(ring.atoms.iter().all(|&a| owner[a] == owner[ring.atoms[0]]));
        }
    }

    #[test]
    fn subcover_never_worse_than_bbb(seed in any::<u64>(), vseed in any::<u64>()) {
        let mol = molecule(seed, 30);
        let mut rng = ChaCha8Rng::seed_from_u64(vseed);
        let vocab = random_vocab(&mut rng, &corpus(vseed, 20, 20), 20, VocabScheme::Bbb);
        let bbb = decompose(&mol, &vocab, Scheme::Bbb).unwrap();
        let sub = decompose(&mol, &vocab, Scheme::Subcover).unwrap();
        prop_assert!(sub.cardinality() <= bbb.cardinality());
    }

    #[test]
    fn psm_reaches_fixpoint(seed in any::<u64>(), cseed in any::<u64>()) {
        let train = corpus(cseed, 30, 15);
        let vocab = psm_build_vocab(&train, 12).unwrap();
        let mol = molecule(seed, 25);
        let d = psm_decompose(&mol, &vocab).unwrap();
        // At most a - 1 merges, one fragment fewer per merge.
        prop_assert!(d.cardinality() >= 1 && d.cardinality() <= mol.atom_count());
        let mut frags: Vec<Vec<usize>> = d.motifs().iter().map(|m| m.atoms.clone()).collect();
        frags.extend(d.singles().iter().map(|&a| vec![a]));
        let mut owner = vec![0; mol.atom_count()];
        for (i, f) in frags.iter().enumerate() {
            for &a in f {
                owner[a] = i;
            }
        }
        for &b in d.inter_bonds() {
            let bond = mol.bond(b);
            let mut union = frags[owner[bond.a]].clone();
            union.extend(&frags[owner[bond.b]]);
            let key = canonical_key(&mol.induced(&union), true).unwrap();
            prop_assert!(!vocab.contains(&key));
        }
    }

    #[test]
    fn vocab_prefixes(seed in any::<u64>()) {
        let train = corpus(seed, 25, 15);
        let small = bbb_build_vocab(&train, 3);
        let large = bbb_build_vocab(&train, 9);
        if let (Ok(s), Ok(l)) = (small, large) {
            prop_assert!(s.len() <= l.len());
            prop_assert_eq!(s.entries(), &l.entries()[..s.len()]);
        }
        let s = psm_build_vocab(&train, 3).unwrap();
        let l = psm_build_vocab(&train, 8).unwrap();
        prop_assert_eq!(s.entries(), &l.entries()[..s.len()]);
    }

    #[test]
    fn valency_bounds(seed in any::<u64>()) {
        let g = scored_graph(seed);
        let accepted = valency_correct(&g);
        let mut used = vec![0u8; g.atoms().len()];
        let bonds = g.intra_bonds().iter().copied().chain(accepted.iter().map(|c| Bond::new(c.u, c.v, c.order)));
        for b in bonds {
            used[b.a] += b.order.value();
            used[b.b] += b.order.value();
        }
        for (a, atom) in g.atoms().iter().enumerate() {
            prop_assert!(used[a] <= atom.max_valence());
        }
    }

    #[test]
    fn raising_confidence_keeps_acceptance(seed in any::<u64>(), pick in any::<prop::sample::Index>(), boost in 0.0f64..1.0) {
        let g = scored_graph(seed);
        prop_assume!(!g.candidates().is_empty());
        let i = pick.index(g.candidates().len());
        let c = g.candidates()[i];
        let accepted = valency_correct(&g);
        prop_assume!(accepted.iter().any(|a| (a.u, a.v, a.order) == (c.u, c.v, c.order)));
        let mut cands = g.candidates().to_vec();
        cands[i].confidence = c.confidence + (1.0 - c.confidence) * boost;
        let motifs = motif_lists(&g);
        let raised = ScoredBondGraph::new(g.atoms().to_vec(), &motifs, cands).unwrap();
        prop_assert!(valency_correct(&raised).iter().any(|a| (a.u, a.v, a.order) == (c.u, c.v, c.order)));
    }

    #[test]
    fn cycle_break_leaves_legal_rings(seed in any::<u64>()) {
        let g = scored_graph(seed);
        for order in [AssembleOrder::ValencyFirst, AssembleOrder::CycleFirst] {
            let out = assemble(&g, order);
            prop_assert!(valences_ok(&out.molecule));
            for b in g.intra_bonds() {
                prop_assert!(out.molecule.bond_between(b.a, b.b).is_some());
            }
            let intra: Vec<bool> = out.molecule.bonds().iter().map(|b| is_intra(&g, b)).collect();
            prop_assert!(illegal_rings(&out.molecule, &intra).is_empty());
            prop_assert!(cycle_violations(&out.molecule, &intra).is_empty());
            prop_assert_eq!(&assemble(&g, order).molecule, &out.molecule);
        }
    }

    #[test]
    fn cycle_break_only_removes_inter_bonds(seed in any::<u64>()) {
        let g = scored_graph(seed);
        let mut bonds = g.intra_bonds().to_vec();
        let mut confidence = vec![1.0; bonds.len()];
        let mut intra = vec![true; bonds.len()];
        for c in valency_correct(&g) {
            bonds.push(Bond::new(c.u, c.v, c.order));
            confidence.push(c.confidence);
            intra.push(false);
        }
        let mol = Molecule::new(g.atoms().to_vec(), bonds).unwrap();
        let out = cycle_break(&mol, &intra, &confidence);
        prop_assert_eq!(out.intra.iter().filter(|&&x| x).count(), g.intra_bonds().len());
        prop_assert_eq!(out.molecule.bond_count() + out.removed.len(), mol.bond_count());
        prop_assert!(illegal_rings(&out.molecule, &out.intra).is_empty());
    }

    #[test]
    fn stats_add_up(seed in any::<u64>()) {
        let mols = corpus(seed, 40, 25);
        let entries: Vec<CorpusEntry> = mols.iter().enumerate().map(|(i, m)| CorpusEntry::new(i.to_string(), m.clone())).collect();
        let vocab = bbb_build_vocab(&mols, 10).unwrap();
        let stats = decomposition_stats(&entries, &vocab, Scheme::Subcover).unwrap();
        let atoms: usize = stats.records.iter().map(|r| r.atoms).sum();
        let singles: usize = stats.records.iter().map(|r| r.singles).sum();
        for r in &stats.records {
            prop_assert_eq!(r.fragments, r.motifs + r.singles);
            prop_assert!(r.fragments <= r.atoms);
        }
        let rate = stats.single_atom_rate();
        prop_assert!((0.0..=1.0).contains(&rate));
        prop_assert_eq!(rate, singles as f64 / atoms as f64);
        let total: usize = stats.fragment_histogram().values().sum();
        prop_assert_eq!(total, mols.len());

        let mut shuffled = entries.clone();
        shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed ^ 1));
        prop_assert_eq!(ring_histogram(&shuffled), ring_histogram(&entries));
        let other = decomposition_stats(&shuffled, &vocab, Scheme::Subcover).unwrap();
        prop_assert_eq!(other.fragment_histogram(), stats.fragment_histogram());
        prop_assert_eq!(other.single_atom_rate(), rate);
    }
}

fn motif_lists(g: &ScoredBondGraph) -> Vec<(Vec<usize>, Vec<Bond>)> {
    let count = g.motif_of().iter().flatten().max().map_or(0, |m| m + 1);
    let mut out = vec![(Vec::new(), Vec::new()); count];
    for (a, m) in g.motif_of().iter().enumerate() {
        if let Some(m) = m {
            out[*m].0.push(a);
        }
    }
    for b in g.intra_bonds() {
        out[g.motif_of()[b.a].unwrap()].1.push(*b);
    }
    out
}

fn is_intra(g: &ScoredBondGraph, b: &Bond) -> bool {
    g.intra_bonds().iter().any(|x| x.a == b.a && x.b == b.b)
}

/// Rings with an inter bond that break the size or sharing rule, checked
/// directly on the ring basis.
fn illegal_rings(mol: &Molecule, intra: &[bool]) -> Vec<Vec<usize>> {
    let rings: Vec<Vec<usize>> = perceive_rings(mol)
        .rings
        .into_iter()
        .filter(|r| r.bonds.iter().any(|&b| !intra[b]))
        .map(|r| r.atoms)
        .collect();
    let mut bad: Vec<Vec<usize>> = rings
        .iter()
        .filter(|r| r.len() != 5 && r.len() != 6)
        .cloned()
        .collect();
    for (i, r) in rings.iter().enumerate() {
        for s in &rings[i + 1..] {
            if r.iter().filter(|a| s.contains(a)).count() > 2 {
                bad.push(r.clone());
            }
        }
    }
    bad
}
