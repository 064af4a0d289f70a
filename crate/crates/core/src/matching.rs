//! Induced subgraph matching.
//!
//! Pattern atoms are assigned in index order and target candidates are tried
//! in ascending index order, so the first complete mapping found is the
//! lexicographically smallest one. Candidates for a pattern atom with an
//! already mapped neighbour come from that neighbour's image's adjacency.

use crate::molecule::{Atom, Molecule};

/// Finds the lexicographically smallest injective mapping of `pattern` onto
/// an induced subgraph of `target`. `mapping[i]` is the target atom for
/// pattern atom `i`.
pub fn match_subgraph(
    pattern: &Molecule,
    target: &Molecule,
    charge_sensitive: bool,
) -> Option<Vec<usize>> {
    let allowed = vec![true; target.atom_count()];
    match_within(pattern, target, &allowed, charge_sensitive)
}

/// Like [`match_subgraph`], restricted to target atoms flagged in `allowed`
/// (the image must be induced within the allowed subgraph).
pub fn match_within(
    pattern: &Molecule,
    target: &Molecule,
    allowed: &[bool],
    charge_sensitive: bool,
) -> Option<Vec<usize>> {
    let k = pattern.atom_count();
    if k == 0 {
        return Some(Vec::new());
    }
    let available = allowed.iter().filter(|&&a| a).count();
    if k > available {
        return None;
    }
    let allowed_degree: Vec<usize> = (0..target.atom_count())
        .map(|v| {
            target
                .neighbors(v)
                .iter()
                .filter(|&&(w, _)| allowed[w])
                .count()
        })
        .collect();
    // For each pattern atom: the earliest pattern neighbour assigned before it.
    let anchor: Vec<Option<usize>> = (0..k)
        .map(|p| {
            pattern
                .neighbors(p)
                .iter()
                .map(|&(q, _)| q)
                .filter(|&q| q < p)
                .min()
        })
        .collect();
    let mut state = State {
        pattern,
        target,
        allowed,
        allowed_degree,
        anchor,
        charge_sensitive,
        mapping: Vec::with_capacity(k),
        used: vec![false; target.atom_count()],
    };
    if state.extend() {
        Some(state.mapping)
    } else {
        None
    }
}

struct State<'a> {
    pattern: &'a Molecule,
    target: &'a Molecule,
    allowed: &'a [bool],
    allowed_degree: Vec<usize>,
    anchor: Vec<Option<usize>>,
    charge_sensitive: bool,
    mapping: Vec<usize>,
    used: Vec<bool>,
}

impl State<'_> {
    fn labels_match(&self, p: Atom, t: Atom) -> bool {
        p.element == t.element && (!self.charge_sensitive || p.charge == t.charge)
    }

    fn extend(&mut self) -> bool {
        let p = self.mapping.len();
        if p == self.pattern.atom_count() {
            return true;
        }
        let candidates: Vec<usize> = match self.anchor[p] {
            Some(q) => self
                .target
                .neighbors(self.mapping[q])
                .iter()
                .map(|&(w, _)| w)
                .collect(),
            None => (0..self.target.atom_count()).collect(),
        };
        for t in candidates {
            if self.feasible(p, t) {
                self.mapping.push(t);
                self.used[t] = true;
                if self.extend() {
                    return true;
                }
                self.used[t] = false;
                self.mapping.pop();
            }
        }
        false
    }

    fn feasible(&self, p: usize, t: usize) -> bool {
        if !self.allowed[t] || self.used[t] {
            return false;
        }
        if !self.labels_match(self.pattern.atom(p), self.target.atom(t)) {
            return false;
        }
        if self.pattern.degree(p) > self.allowed_degree[t] {
            return false;
        }
        // Edges and non-edges to every already mapped atom must agree.
        for (q, &s) in self.mapping.iter().enumerate() {
            let pb = self
                .pattern
                .bond_between(p, q)
                .map(|b| self.pattern.bond(b).order);
            let tb = self
                .target
                .bond_between(t, s)
                .map(|b| self.target.bond(b).order);
            if pb != tb {
                return false;
            }
        }
        true
    }
}
