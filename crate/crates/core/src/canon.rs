//! Exact canonical labeling of small labeled graphs.
//!
//! Colour refinement seeds an ordered partition from (element, charge,
//! degree, bond-order multiset) and refines it to an equitable partition.
//! Remaining ties are resolved by individualising each vertex of the first
//! smallest non-trivial cell and recursing; every leaf is a total order and
//! the lexicographically smallest leaf encoding wins. Automorphisms found
//! along the way (two leaves with equal encodings) prune sibling branches
//! lying in the same orbit.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::molecule::Molecule;

/// Canonical identifier of a fragment's isomorphism class.
///
/// Two fragments have equal keys iff they are isomorphic as graphs labelled
/// by element, bond order and (for charge-sensitive keys) formal charge.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MotifKey {
    bytes: Vec<u8>,
    charge_sensitive: bool,
}

impl MotifKey {
    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn charge_sensitive(&self) -> bool {
        self.charge_sensitive
    }

    pub fn to_hex(&self) -> String {
        let mut s = String::with_capacity(self.bytes.len() * 2 + 2);
        s.push_str(if self.charge_sensitive { "q:" } else { "n:" });
        for b in &self.bytes {
            s.push_str(&format!("{b:02x}"));
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid motif key `{0}`")]
pub struct KeyParseError(pub String);

impl std::str::FromStr for MotifKey {
    type Err = KeyParseError;

    /// Parses the [`MotifKey::to_hex`] form.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || KeyParseError(s.to_string());
        let (charge_sensitive, hex) = if let Some(rest) = s.strip_prefix("q:") {
            (true, rest)
        } else if let Some(rest) = s.strip_prefix("n:") {
            (false, rest)
        } else {
            return Err(bad());
        };
        if hex.len() % 2 != 0 || !hex.is_ascii() {
            return Err(bad());
        }
        let bytes = (0..hex.len())
            .step_by(2)
            .map(|i| u8::from_str_radix(&hex[i..i + 2], 16).map_err(|_| bad()))
            .collect::<Result<Vec<u8>, _>>()?;
        Ok(MotifKey {
            bytes,
            charge_sensitive,
        })
    }
}

impl fmt::Debug for MotifKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MotifKey({})", self.to_hex())
    }
}

impl fmt::Display for MotifKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CanonError {
    #[error("fragment is disconnected ({0} components)")]
    Disconnected(usize),
    #[error("fragment is empty")]
    Empty,
}

/// Canonical key of a whole (connected) molecule or fragment graph.
pub fn canonical_key(mol: &Molecule, charge_sensitive: bool) -> Result<MotifKey, CanonError> {
    if mol.atom_count() == 0 {
        return Err(CanonError::Empty);
    }
    let comps = mol.components().len();
    if comps != 1 {
        return Err(CanonError::Disconnected(comps));
    }
    Ok(canonical_key_unchecked(mol, charge_sensitive))
}

/// Canonical key of the subgraph of `mol` induced by `atoms`.
pub fn subgraph_key(
    mol: &Molecule,
    atoms: &[usize],
    charge_sensitive: bool,
) -> Result<MotifKey, CanonError> {
    if atoms.is_empty() {
        return Err(CanonError::Empty);
    }
    let comps = mol.components_within(atoms).len();
    if comps != 1 {
        return Err(CanonError::Disconnected(comps));
    }
    Ok(canonical_key_unchecked(
        &mol.induced(atoms),
        charge_sensitive,
    ))
}

pub(crate) fn canonical_key_unchecked(mol: &Molecule, charge_sensitive: bool) -> MotifKey {
    let form = canonical_form(mol, charge_sensitive);
    let mut bytes = Vec::with_capacity(form.encoding.len() * 2);
    for word in &form.encoding {
        bytes.extend_from_slice(&word.to_be_bytes());
    }
    MotifKey {
        bytes,
        charge_sensitive,
    }
}

/// Result of canonical labeling: `order[i]` is the atom placed at canonical
/// position `i`.
#[derive(Debug, Clone)]
pub struct CanonicalForm {
    pub order: Vec<usize>,
    encoding: Vec<u16>,
}

impl CanonicalForm {
    /// Canonical position of every atom (inverse of `order`).
    pub fn ranks(&self) -> Vec<usize> {
        let mut ranks = vec![0; self.order.len()];
        for (pos, &atom) in self.order.iter().enumerate() {
            ranks[atom] = pos;
        }
        ranks
    }
}

fn atom_label(mol: &Molecule, atom: usize, charge_sensitive: bool) -> u16 {
    let a = mol.atom(atom);
    let charge = if charge_sensitive {
        (a.charge as i16 + 16) as u16
    } else {
        0
    };
    a.element.atomic_number() as u16 * 32 + charge
}

struct Search {
    labels: Vec<u16>,
    adj: Vec<Vec<(usize, u8)>>,
    best: Option<(Vec<u16>, Vec<usize>)>,
    automorphisms: Vec<Vec<usize>>,
}

/// Canonical labeling of any molecule graph (connected or not).
pub fn canonical_form(mol: &Molecule, charge_sensitive: bool) -> CanonicalForm {
    let n = mol.atom_count();
    let labels: Vec<u16> = (0..n)
        .map(|i| atom_label(mol, i, charge_sensitive))
        .collect();
    let adj: Vec<Vec<(usize, u8)>> = (0..n)
        .map(|i| {
            mol.neighbors(i)
                .iter()
                .map(|&(nb, b)| (nb, mol.bond(b).order.value()))
                .collect()
        })
        .collect();

    // Initial ordered partition by local invariants.
    let invariants: Vec<(u16, usize, Vec<u8>)> = (0..n)
        .map(|i| {
            let mut orders: Vec<u8> = adj[i].iter().map(|&(_, o)| o).collect();
            orders.sort_unstable();
            (labels[i], adj[i].len(), orders)
        })
        .collect();
    let mut atoms: Vec<usize> = (0..n).collect();
    atoms.sort_by(|&x, &y| invariants[x].cmp(&invariants[y]));
    let mut cells = vec![0usize; n];
    for pos in 1..n {
        cells[atoms[pos]] = if invariants[atoms[pos]] == invariants[atoms[pos - 1]] {
            cells[atoms[pos - 1]]
        } else {
            pos
        };
    }

    let mut search = Search {
        labels,
        adj,
        best: None,
        automorphisms: Vec::new(),
    };
    let mut prefix = Vec::new();
    search.explore(cells, &mut prefix);
    let (encoding, order) = search.best.expect("search visits at least one leaf");
    CanonicalForm { order, encoding }
}

impl Search {
    /// Refines `cells` (cell id = first position of the cell) to an
    /// equitable ordered partition.
    fn refine(&self, cells: &mut [usize]) {
        let n = cells.len();
        let mut distinct = count_cells(cells);
        loop {
            let signatures: Vec<(usize, Vec<(usize, u8)>)> = (0..n)
                .map(|v| {
                    let mut nbrs: Vec<(usize, u8)> =
                        self.adj[v].iter().map(|&(nb, o)| (cells[nb], o)).collect();
                    nbrs.sort_unstable();
                    (cells[v], nbrs)
                })
                .collect();
            let mut atoms: Vec<usize> = (0..n).collect();
            atoms.sort_by(|&x, &y| signatures[x].cmp(&signatures[y]));
            for pos in 0..n {
                let v = atoms[pos];
                cells[v] = if pos > 0 && signatures[v] == signatures[atoms[pos - 1]] {
                    cells[atoms[pos - 1]]
                } else {
                    pos
                };
            }
            let now = count_cells(cells);
            if now == distinct {
                return;
            }
            distinct = now;
        }
    }

    fn explore(&mut self, mut cells: Vec<usize>, prefix: &mut Vec<usize>) {
        self.refine(&mut cells);
        let n = cells.len();

        // Group atoms per cell to find the target cell.
        let mut size = vec![0usize; n];
        for &c in &cells {
            size[c] += 1;
        }
        let target = (0..n)
            .filter(|&c| size[c] > 1)
            .min_by_key(|&c| (size[c], c));
        let Some(target) = target else {
            self.leaf(&cells);
            return;
        };

        let members: Vec<usize> = (0..n).filter(|&v| cells[v] == target).collect();
        let mut tried: Vec<usize> = Vec::new();
        for &v in &members {
            if !tried.is_empty() && self.same_orbit(prefix, &tried, v) {
                continue;
            }
            let mut child = cells.clone();
            for &w in &members {
                if w != v {
                    child[w] = target + 1;
                }
            }
            prefix.push(v);
            self.explore(child, prefix);
            prefix.pop();
            tried.push(v);
        }
    }

    fn leaf(&mut self, cells: &[usize]) {
        let n = cells.len();
        let mut order = vec![0usize; n];
        for (v, &c) in cells.iter().enumerate() {
            order[c] = v;
        }
        let mut encoding = Vec::with_capacity(1 + 2 * n);
        encoding.push(n as u16);
        encoding.extend(order.iter().map(|&v| self.labels[v]));
        for (pos, &v) in order.iter().enumerate() {
            let mut row: Vec<(usize, u8)> = self.adj[v]
                .iter()
                .filter(|&&(nb, _)| cells[nb] > pos)
                .map(|&(nb, o)| (cells[nb], o))
                .collect();
            row.sort_unstable();
            encoding.push(row.len() as u16);
            for (p, o) in row {
                encoding.push(p as u16);
                encoding.push(o as u16);
            }
        }
        match &self.best {
            None => self.best = Some((encoding, order)),
            Some((best, best_order)) => match encoding.cmp(best) {
                Ordering::Less => self.best = Some((encoding, order)),
                Ordering::Equal => {
                    let mut auto = vec![0usize; n];
                    for pos in 0..n {
                        auto[best_order[pos]] = order[pos];
                    }
                    if auto.iter().enumerate().any(|(i, &j)| i != j) {
                        self.automorphisms.push(auto);
                    }
                }
                Ordering::Greater => {}
            },
        }
    }

    /// Whether `v` shares an orbit with an already tried vertex under the
    /// known automorphisms that fix `prefix` pointwise.
    fn same_orbit(&self, prefix: &[usize], tried: &[usize], v: usize) -> bool {
        let n = self.labels.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut any = false;
        for auto in &self.automorphisms {
            if prefix.iter().any(|&p| auto[p] != p) {
                continue;
            }
            any = true;
            for (i, &j) in auto.iter().enumerate() {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri] = rj;
                }
            }
        }
        if !any {
            return false;
        }
        let rv = find(&mut parent, v);
        tried.iter().any(|&t| find(&mut parent, t) == rv)
    }
}

fn count_cells(cells: &[usize]) -> usize {
    let mut seen = vec![false; cells.len()];
    let mut count = 0;
    for &c in cells {
        if !seen[c] {
            seen[c] = true;
            count += 1;
        }
    }
    count
}
