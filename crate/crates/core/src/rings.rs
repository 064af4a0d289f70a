//! Bridge detection and smallest-set-of-smallest-rings perception.

use std::collections::{HashSet, VecDeque};

use crate::molecule::Molecule;

/// Ring membership of every atom and bond, plus a minimum cycle basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingInfo {
    pub atom_in_ring: Vec<bool>,
    pub bond_in_ring: Vec<bool>,
    /// Smallest rings as atom cycles, sorted by (size, atoms).
    pub rings: Vec<Ring>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ring {
    /// Atoms in cycle order, starting at the smallest index and continuing
    /// towards its smaller ring neighbour.
    pub atoms: Vec<usize>,
    /// Bond indices of the cycle, ascending.
    pub bonds: Vec<usize>,
}

impl Ring {
    pub fn size(&self) -> usize {
        self.atoms.len()
    }
}

impl RingInfo {
    pub fn ring_count(&self) -> usize {
        self.rings.len()
    }

    pub fn has_ring_bond(&self) -> bool {
        self.bond_in_ring.iter().any(|&r| r)
    }
}

pub fn perceive_rings(mol: &Molecule) -> RingInfo {
    let bond_in_ring: Vec<bool> = bridges(mol)
        .into_iter()
        .map(|is_bridge| !is_bridge)
        .collect();
    let mut atom_in_ring = vec![false; mol.atom_count()];
    for (i, bond) in mol.bonds().iter().enumerate() {
        if bond_in_ring[i] {
            atom_in_ring[bond.a] = true;
            atom_in_ring[bond.b] = true;
        }
    }
    let rings = smallest_rings(mol, &bond_in_ring);
    RingInfo {
        atom_in_ring,
        bond_in_ring,
        rings,
    }
}

/// `true` for every bond whose removal disconnects its endpoints.
pub fn bridges(mol: &Molecule) -> Vec<bool> {
    let n = mol.atom_count();
    let mut is_bridge = vec![false; mol.bond_count()];
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut timer = 0;
    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        // Frames: (atom, bond used to enter, next neighbour slot).
        let mut stack: Vec<(usize, usize, usize)> = vec![(root, usize::MAX, 0)];
        disc[root] = timer;
        low[root] = timer;
        timer += 1;
        while let Some(frame) = stack.last_mut() {
            let (v, via, slot) = *frame;
            if let Some(&(w, bond)) = mol.neighbors(v).get(slot) {
                frame.2 += 1;
                if bond == via {
                    continue;
                }
                if disc[w] == usize::MAX {
                    disc[w] = timer;
                    low[w] = timer;
                    timer += 1;
                    stack.push((w, bond, 0));
                } else {
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                stack.pop();
                if let Some(&(parent, _, _)) = stack.last() {
                    low[parent] = low[parent].min(low[v]);
                    if low[v] > disc[parent] {
                        is_bridge[via] = true;
                    }
                }
            }
        }
    }
    is_bridge
}

struct BitSet(Vec<u64>);

impl BitSet {
    fn new(bits: usize) -> BitSet {
        BitSet(vec![0; bits.div_ceil(64)])
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    fn xor(&mut self, other: &BitSet) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a ^= b;
        }
    }

    fn lowest(&self) -> Option<usize> {
        self.0
            .iter()
            .enumerate()
            .find(|(_, w)| **w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }
}

/// Minimum cycle basis over the ring bonds (Horton candidates, greedily
/// filtered by GF(2) independence).
fn smallest_rings(mol: &Molecule, bond_in_ring: &[bool]) -> Vec<Ring> {
    let ring_atoms: Vec<usize> = (0..mol.atom_count())
        .filter(|&v| mol.neighbors(v).iter().any(|&(_, b)| bond_in_ring[b]))
        .collect();
    if ring_atoms.is_empty() {
        return Vec::new();
    }
    let ring_bond_count = bond_in_ring.iter().filter(|&&r| r).count();
    let ring_components = {
        let mut comps = 0;
        let mut seen = vec![false; mol.atom_count()];
        for &start in &ring_atoms {
            if seen[start] {
                continue;
            }
            comps += 1;
            seen[start] = true;
            let mut queue = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                for &(w, b) in mol.neighbors(v) {
                    if bond_in_ring[b] && !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
        }
        comps
    };
    let rank = ring_bond_count + ring_components - ring_atoms.len();

    let mut candidates: Vec<Vec<usize>> = Vec::new();
    let mut seen_sets: HashSet<Vec<usize>> = HashSet::new();
    for &root in &ring_atoms {
        let (parent_bond, depth) = bfs_tree(mol, root, bond_in_ring);
        for (b, bond) in mol.bonds().iter().enumerate() {
            if !bond_in_ring[b] || depth[bond.a] == usize::MAX || depth[bond.b] == usize::MAX {
                continue;
            }
            if parent_bond[bond.a] == b || parent_bond[bond.b] == b {
                continue;
            }
            // Tree paths must meet only at the root for a simple cycle.
            let atoms_a = path_atoms(mol, bond.a, &parent_bond);
            let atoms_b = path_atoms(mol, bond.b, &parent_bond);
            if atoms_a.iter().filter(|x| atoms_b.contains(x)).count() != 1 {
                continue;
            }
            let mut cycle = path_to_root(mol, bond.a, &parent_bond);
            cycle.extend(path_to_root(mol, bond.b, &parent_bond));
            cycle.push(b);
            cycle.sort_unstable();
            if seen_sets.insert(cycle.clone()) {
                candidates.push(cycle);
            }
        }
    }
    candidates.sort_by(|x, y| x.len().cmp(&y.len()).then_with(|| x.cmp(y)));

    // Greedy independence test via Gaussian elimination over GF(2).
    let m = mol.bond_count();
    let mut basis: Vec<(usize, BitSet)> = Vec::new();
    let mut rings = Vec::new();
    for cycle in candidates {
        if rings.len() == rank {
            break;
        }
        let mut bits = BitSet::new(m);
        for &b in &cycle {
            bits.set(b);
        }
        for (pivot, row) in &basis {
            if bits.get(*pivot) {
                bits.xor(row);
            }
        }
        if let Some(pivot) = bits.lowest() {
            for (_, row) in basis.iter_mut() {
                if row.get(pivot) {
                    row.xor(&bits);
                }
            }
            basis.push((pivot, bits));
            rings.push(ring_from_bonds(mol, cycle));
        }
    }
    rings.sort_by(|x, y| x.size().cmp(&y.size()).then_with(|| x.atoms.cmp(&y.atoms)));
    rings
}

fn bfs_tree(mol: &Molecule, root: usize, bond_in_ring: &[bool]) -> (Vec<usize>, Vec<usize>) {
    let n = mol.atom_count();
    let mut parent_bond = vec![usize::MAX; n];
    let mut depth = vec![usize::MAX; n];
    depth[root] = 0;
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        for &(w, b) in mol.neighbors(v) {
            if bond_in_ring[b] && depth[w] == usize::MAX {
                depth[w] = depth[v] + 1;
                parent_bond[w] = b;
                queue.push_back(w);
            }
        }
    }
    (parent_bond, depth)
}

fn path_to_root(mol: &Molecule, mut v: usize, parent_bond: &[usize]) -> Vec<usize> {
    let mut bonds = Vec::new();
    while parent_bond[v] != usize::MAX {
        let b = parent_bond[v];
        bonds.push(b);
        v = mol.bond(b).other(v);
    }
    bonds
}

fn path_atoms(mol: &Molecule, mut v: usize, parent_bond: &[usize]) -> Vec<usize> {
    let mut atoms = vec![v];
    while parent_bond[v] != usize::MAX {
        v = mol.bond(parent_bond[v]).other(v);
        atoms.push(v);
    }
    atoms
}

fn ring_from_bonds(mol: &Molecule, bonds: Vec<usize>) -> Ring {
    let start = bonds
        .iter()
        .flat_map(|&b| [mol.bond(b).a, mol.bond(b).b])
        .min()
        .expect("non-empty cycle");
    let incident = |v: usize| -> Vec<usize> {
        let mut nbrs: Vec<usize> = bonds
            .iter()
            .map(|&b| mol.bond(b))
            .filter(|bd| bd.a == v || bd.b == v)
            .map(|bd| bd.other(v))
            .collect();
        nbrs.sort_unstable();
        nbrs
    };
    let mut atoms = vec![start];
    let mut prev = start;
    let mut cur = incident(start)[0];
    while cur != start {
        atoms.push(cur);
        let next = incident(cur)
            .into_iter()
            .find(|&w| w != prev)
            .expect("cycle vertices have degree two");
        prev = cur;
        cur = next;
    }
    Ring { atoms, bonds }
}
