use std::fmt::Write;

use crate::canon::canonical_form;
use crate::element::implicit_hydrogens;
use crate::molecule::{BondOrder, Molecule};

/// Canonical Kekulé SMILES.
///
/// Atoms are visited depth-first in canonical rank order, so isomorphic
/// molecules produce identical strings. Disconnected graphs are written as
/// '.'-separated components, which [`parse_smiles`](super::parse_smiles)
/// deliberately refuses to read back.
pub fn write_smiles(mol: &Molecule) -> String {
    if mol.atom_count() == 0 {
        return String::new();
    }
    let ranks = canonical_form(mol, true).ranks();
    let mut components = mol.components();
    components.sort_by_key(|c| c.iter().map(|&a| ranks[a]).min());

    let mut out = String::new();
    for (i, comp) in components.iter().enumerate() {
        if i > 0 {
            out.push('.');
        }
        let start = *comp.iter().min_by_key(|&&a| ranks[a]).expect("non-empty");
        Emitter::new(mol, &ranks).component(start, &mut out);
    }
    out
}

struct Emitter<'a> {
    mol: &'a Molecule,
    ranks: &'a [usize],
    visited: Vec<bool>,
    /// Children in the DFS tree, per atom, in emission order.
    children: Vec<Vec<usize>>,
    /// Ring-closure bonds, recorded at both endpoints.
    closures: Vec<Vec<usize>>,
    tree_bond: Vec<bool>,
}

impl<'a> Emitter<'a> {
    fn new(mol: &'a Molecule, ranks: &'a [usize]) -> Emitter<'a> {
        let n = mol.atom_count();
        Emitter {
            mol,
            ranks,
            visited: vec![false; n],
            children: vec![Vec::new(); n],
            closures: vec![Vec::new(); n],
            tree_bond: vec![false; mol.bond_count()],
        }
    }

    fn sorted_neighbors(&self, v: usize) -> Vec<(usize, usize)> {
        let mut nbrs = self.mol.neighbors(v).to_vec();
        nbrs.sort_by_key(|&(w, _)| self.ranks[w]);
        nbrs
    }

    fn component(mut self, start: usize, out: &mut String) {
        // Pass 1: spanning tree and ring closures.
        let mut order = Vec::new();
        let mut stack = vec![(start, usize::MAX)];
        while let Some((v, via)) = stack.pop() {
            if self.visited[v] {
                continue;
            }
            self.visited[v] = true;
            order.push(v);
            if via != usize::MAX {
                self.tree_bond[via] = true;
                let parent = self.mol.bond(via).other(v);
                self.children[parent].push(v);
            }
            for &(w, b) in self.sorted_neighbors(v).iter().rev() {
                if !self.visited[w] {
                    stack.push((w, b));
                }
            }
        }
        for (b, bond) in self.mol.bonds().iter().enumerate() {
            if !self.tree_bond[b] && self.visited[bond.a] {
                self.closures[bond.a].push(b);
                self.closures[bond.b].push(b);
            }
        }
        // Position of each atom in emission order.
        let mut position = vec![usize::MAX; self.mol.atom_count()];
        for (i, &v) in order.iter().enumerate() {
            position[v] = i;
        }
        for v in &order {
            let pos = &position;
            let mol = self.mol;
            self.closures[*v].sort_by_key(|&b| {
                let other = mol.bond(b).other(*v);
                (pos[other] > pos[*v], pos[other])
            });
        }

        // Pass 2: emission.
        let mut digits: Vec<Option<usize>> = vec![None; self.mol.bond_count()];
        let mut in_use: Vec<bool> = vec![false; 100];
        let mut stack: Vec<Frame> = vec![Frame::Atom(start, None)];
        while let Some(frame) = stack.pop() {
            match frame {
                Frame::Close => out.push(')'),
                Frame::Open => out.push('('),
                Frame::Atom(v, via) => {
                    if let Some(b) = via {
                        push_bond(out, self.mol.bond(b).order);
                    }
                    self.atom_text(v, out);
                    let mut freed = Vec::new();
                    for &b in &self.closures[v] {
                        let other = self.mol.bond(b).other(v);
                        if position[other] < position[v] {
                            let d = digits[b].expect("ring opened earlier");
                            write_label(out, d);
                            freed.push(d);
                        } else {
                            let d = (1..100)
                                .find(|&d| !in_use[d])
                                .expect("fewer than 100 open rings");
                            in_use[d] = true;
                            digits[b] = Some(d);
                            push_bond(out, self.mol.bond(b).order);
                            write_label(out, d);
                        }
                    }
                    for d in freed {
                        in_use[d] = false;
                    }
                    let kids = &self.children[v];
                    // Last child continues the main chain; others branch.
                    for (i, &c) in kids.iter().enumerate().rev() {
                        let via = self.mol.bond_between(v, c);
                        if i + 1 == kids.len() {
                            stack.push(Frame::Atom(c, via));
                        } else {
                            stack.push(Frame::Close);
                            stack.push(Frame::Atom(c, via));
                            stack.push(Frame::Open);
                        }
                    }
                }
            }
        }
    }

    fn atom_text(&self, v: usize, out: &mut String) {
        let atom = self.mol.atom(v);
        if atom.charge == 0 && atom.element.in_organic_subset() {
            out.push_str(atom.element.symbol());
            return;
        }
        out.push('[');
        out.push_str(atom.element.symbol());
        let h = implicit_hydrogens(atom.element, atom.charge, self.mol.bond_order_sum(v));
        match h {
            0 => {}
            1 => out.push('H'),
            n => {
                let _ = write!(out, "H{n}");
            }
        }
        match atom.charge {
            0 => {}
            1 => out.push('+'),
            -1 => out.push('-'),
            c if c > 0 => {
                let _ = write!(out, "+{c}");
            }
            c => {
                let _ = write!(out, "{c}");
            }
        }
        out.push(']');
    }
}

enum Frame {
    Atom(usize, Option<usize>),
    Open,
    Close,
}

fn push_bond(out: &mut String, order: BondOrder) {
    match order {
        BondOrder::Single => {}
        BondOrder::Double => out.push('='),
        BondOrder::Triple => out.push('#'),
    }
}

fn write_label(out: &mut String, d: usize) {
    if d < 10 {
        out.push(char::from(b'0' + d as u8));
    } else {
        let _ = write!(out, "%{d:02}");
    }
}
