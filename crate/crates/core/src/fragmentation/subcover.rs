use crate::fragment::Fragment;
use crate::matching::match_within;
use crate::molecule::Molecule;
use crate::vocab::{element_histogram, Vocabulary};

use super::{bbb_fragment, check_scheme, Decomposition, Motif, Scheme, SchemeMismatch};

/// BBB fragmentation, then recursive motif extraction from every fragment
/// the vocabulary does not contain as a whole.
pub fn subcover_decompose(
    mol: &Molecule,
    vocab: &Vocabulary,
) -> Result<Decomposition, SchemeMismatch> {
    check_scheme(Scheme::Subcover, vocab)?;
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
        let (found, left) = find_m_in_f(mol, &frag, vocab);
        motifs.extend(found);
        singles.extend(left);
    }
    Ok(Decomposition::from_parts(
        mol,
        Scheme::Subcover,
        motifs,
        singles,
    ))
}

/// Extracts motifs from `frag` greedily: the largest contained vocabulary
/// motif wins, then the more frequent, then the smaller key. Matching is
/// induced and ignores formal charges. After removing a match, each
/// connected piece of the remainder is searched on its own; atoms left
/// when nothing matches are returned as singles.
pub fn find_m_in_f(
    mol: &Molecule,
    frag: &Fragment,
    vocab: &Vocabulary,
) -> (Vec<Motif>, Vec<usize>) {
    let mut motifs = Vec::new();
    let mut singles = Vec::new();
    let mut allowed = vec![false; mol.atom_count()];
    let mut stack = vec![frag.atoms().to_vec()];
    // Depth-first with the first component on top keeps output order stable.
    while let Some(part) = stack.pop() {
        if part.len() < 2 {
            singles.extend(part);
            continue;
        }
        for &a in &part {
            allowed[a] = true;
        }
        let available = element_histogram(mol, part.iter().copied());
        let hit = vocab
            .by_preference()
            .filter(|e| e.atom_count <= part.len() && e.fits(&available))
            .find_map(|e| match_within(&e.molecule, mol, &allowed, false).map(|m| (e, m)));
        for &a in &part {
            allowed[a] = false;
        }
        let Some((entry, mut mapping)) = hit else {
            singles.extend(part);
            continue;
        };
        mapping.sort_unstable();
        let rest: Vec<usize> = part
            .iter()
            .copied()
            .filter(|a| mapping.binary_search(a).is_err())
            .collect();
        motifs.push(Motif {
            atoms: mapping,
            key: entry.key.clone(),
        });
        for comp in mol.components_within(&rest).into_iter().rev() {
            stack.push(comp);
        }
    }
    singles.sort_unstable();
    (motifs, singles)
}
