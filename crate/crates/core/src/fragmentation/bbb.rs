use crate::fragment::Fragment;
use crate::molecule::Molecule;
use crate::rings::perceive_rings;
use crate::vocab::Vocabulary;

use super::{Decomposition, Motif, Scheme};

/// Cuts every acyclic bond touching a ring atom and returns the resulting
/// connected pieces, ordered by smallest atom.
pub fn bbb_fragment(mol: &Molecule) -> Vec<Fragment> {
    let rings = perceive_rings(mol);
    let cut: Vec<usize> = (0..mol.bond_count())
        .filter(|&i| {
            let b = mol.bond(i);
            !rings.bond_in_ring[i] && (rings.atom_in_ring[b.a] || rings.atom_in_ring[b.b])
        })
        .collect();
    mol.without_bonds(&cut)
        .components()
        .into_iter()
        .map(|atoms| Fragment::from_sorted(mol, atoms))
        .collect()
}

/// BBB fragments found in the vocabulary (by charge-sensitive key) become
/// motifs; every other fragment is split into single atoms.
pub fn bbb_decompose(mol: &Molecule, vocab: &Vocabulary) -> Decomposition {
    let mut motifs = Vec::new();
    let mut singles = Vec::new();
    for frag in bbb_fragment(mol) {
        if frag.len() >= 2 {
            let key = frag.key(mol, true);
            if vocab.contains(&key) {
                motifs.push(Motif {
                    atoms: frag.atoms().to_vec(),
                    key,
                });
                continue;
            }
        }
        singles.extend_from_slice(frag.atoms());
    }
    Decomposition::from_parts(mol, Scheme::Bbb, motifs, singles)
}
