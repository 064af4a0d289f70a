//! Assignment of explicit double bonds to aromatic systems.
//!
//! An aromatic atom needs a double bond when one more unit of bond order
//! still fits its default valence (the smallest allowed valence covering its
//! current bonds and explicit hydrogens). The atoms needing one are matched
//! perfectly along aromatic bonds by backtracking, always extending the
//! most constrained atom first.

use crate::element::allowed_valences;
use crate::molecule::{Atom, Bond};

use super::parser::{finalize_atoms, finalize_bonds, BondKind, RawAtom, RawBond};
use super::SmilesError;

pub(super) fn kekulize(
    atoms: Vec<RawAtom>,
    bonds: Vec<RawBond>,
) -> Result<(Vec<Atom>, Vec<Bond>, Vec<u8>), SmilesError> {
    let hydrogens: Vec<u8> = atoms.iter().map(|a| a.hydrogens).collect();
    let mut double = vec![false; bonds.len()];
    if atoms.iter().any(|a| a.aromatic) || bonds.iter().any(|b| b.kind == BondKind::Aromatic) {
        let needs = needs_double(&atoms, &bonds);
        let mut matcher = Matcher::new(&atoms, &bonds, &needs);
        if !matcher.solve() {
            let mut stuck: Vec<usize> = (0..atoms.len()).filter(|&i| needs[i]).collect();
            stuck.sort_unstable();
            return Err(SmilesError::Kekulize { atoms: stuck });
        }
        for (i, m) in matcher.bond_used.iter().enumerate() {
            double[i] = *m;
        }
    }
    Ok((
        finalize_atoms(&atoms),
        finalize_bonds(&bonds, &double),
        hydrogens,
    ))
}

fn needs_double(atoms: &[RawAtom], bonds: &[RawBond]) -> Vec<bool> {
    let mut sum: Vec<u8> = atoms.iter().map(|a| a.hydrogens).collect();
    let mut has_aromatic_bond = vec![false; atoms.len()];
    for b in bonds {
        let order = match b.kind {
            BondKind::Order(o) => o.value(),
            BondKind::Aromatic => {
                has_aromatic_bond[b.a] = true;
                has_aromatic_bond[b.b] = true;
                1
            }
        };
        sum[b.a] += order;
        sum[b.b] += order;
    }
    atoms
        .iter()
        .enumerate()
        .map(|(i, a)| {
            if !a.aromatic {
                return false;
            }
            let element = a.element.expect("hydrogens folded");
            let target = allowed_valences(element, a.charge)
                .iter()
                .copied()
                .find(|&v| v >= sum[i]);
            matches!(target, Some(t) if sum[i] < t)
        })
        .collect()
}

struct Matcher<'a> {
    needs: &'a [bool],
    /// Per atom: (neighbour, bond index) over aromatic bonds between two
    /// atoms that both need a double bond.
    options: Vec<Vec<(usize, usize)>>,
    matched: Vec<bool>,
    bond_used: Vec<bool>,
}

impl<'a> Matcher<'a> {
    fn new(atoms: &[RawAtom], bonds: &[RawBond], needs: &'a [bool]) -> Matcher<'a> {
        let mut options = vec![Vec::new(); atoms.len()];
        for (i, b) in bonds.iter().enumerate() {
            if b.kind == BondKind::Aromatic && needs[b.a] && needs[b.b] {
                options[b.a].push((b.b, i));
                options[b.b].push((b.a, i));
            }
        }
        for list in &mut options {
            list.sort_unstable();
        }
        Matcher {
            needs,
            options,
            matched: vec![false; atoms.len()],
            bond_used: vec![false; bonds.len()],
        }
    }

    fn solve(&mut self) -> bool {
        // Most constrained unmatched atom first.
        let mut pick: Option<(usize, usize)> = None;
        for v in 0..self.needs.len() {
            if !self.needs[v] || self.matched[v] {
                continue;
            }
            let free = self.options[v]
                .iter()
                .filter(|&&(w, _)| !self.matched[w])
                .count();
            if free == 0 {
                return false;
            }
            if pick.is_none_or(|(_, best)| free < best) {
                pick = Some((v, free));
            }
        }
        let Some((v, _)) = pick else {
            return true;
        };
        let choices: Vec<(usize, usize)> = self.options[v]
            .iter()
            .copied()
            .filter(|&(w, _)| !self.matched[w])
            .collect();
        for (w, bond) in choices {
            self.matched[v] = true;
            self.matched[w] = true;
            self.bond_used[bond] = true;
            if self.solve() {
                return true;
            }
            self.matched[v] = false;
            self.matched[w] = false;
            self.bond_used[bond] = false;
        }
        false
    }
}
