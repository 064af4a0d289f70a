use std::collections::BTreeMap;

use crate::element::Element;
use crate::molecule::{Atom, Bond, BondOrder, Molecule};

use super::kekulize::kekulize;
use super::SmilesError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(super) enum BondKind {
    Order(BondOrder),
    Aromatic,
}

#[derive(Debug, Clone)]
pub(super) struct RawAtom {
    /// `None` for an explicit hydrogen atom (`[H]`), folded away later.
    pub element: Option<Element>,
    pub charge: i8,
    pub aromatic: bool,
    pub hydrogens: u8,
    pub position: usize,
}

#[derive(Debug, Clone, Copy)]
pub(super) struct RawBond {
    pub a: usize,
    pub b: usize,
    pub kind: BondKind,
}

struct Parser<'a> {
    text: &'a [u8],
    pos: usize,
    atoms: Vec<RawAtom>,
    bonds: Vec<RawBond>,
    /// Ring label -> (atom, explicit bond symbol, position of the label).
    open_rings: BTreeMap<u32, (usize, Option<BondKind>, usize)>,
}

fn syntax(position: usize, message: impl Into<String>) -> SmilesError {
    SmilesError::Syntax {
        position,
        message: message.into(),
    }
}

/// Parses one connected molecule.
pub fn parse_smiles(text: &str) -> Result<Molecule, SmilesError> {
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Err(SmilesError::Empty);
    }
    let mut parser = Parser {
        text: trimmed.as_bytes(),
        pos: 0,
        atoms: Vec::new(),
        bonds: Vec::new(),
        open_rings: BTreeMap::new(),
    };
    parser.run()?;
    if let Some((&label, &(_, _, position))) = parser.open_rings.iter().next() {
        return Err(SmilesError::UnclosedRing { position, label });
    }
    let (atoms, bonds) = fold_hydrogens(parser.atoms, parser.bonds)?;
    let (atoms, bonds, hydrogens) = kekulize(atoms, bonds)?;
    let mol = Molecule::with_hydrogens(atoms, bonds, &hydrogens).map_err(SmilesError::Valence)?;
    Ok(mol.with_source(trimmed))
}

impl Parser<'_> {
    fn peek(&self) -> Option<u8> {
        self.text.get(self.pos).copied()
    }

    fn run(&mut self) -> Result<(), SmilesError> {
        let mut prev: Option<usize> = None;
        let mut branches: Vec<usize> = Vec::new();
        let mut pending: Option<(BondKind, usize)> = None;
        // Set right after '(' to reject empty branches.
        let mut branch_open_at: Option<usize> = None;

        while let Some(c) = self.peek() {
            let start = self.pos;
            match c {
                b'(' => {
                    let Some(p) = prev else {
                        return Err(syntax(start, "branch without a preceding atom"));
                    };
                    if pending.is_some() {
                        return Err(syntax(start, "bond symbol before '('"));
                    }
                    branches.push(p);
                    branch_open_at = Some(start);
                    self.pos += 1;
                }
                b')' => {
                    if branch_open_at.is_some() {
                        return Err(syntax(start, "empty branch"));
                    }
                    if pending.is_some() {
                        return Err(syntax(start, "dangling bond before ')'"));
                    }
                    let Some(p) = branches.pop() else {
                        return Err(syntax(start, "unbalanced ')'"));
                    };
                    prev = Some(p);
                    self.pos += 1;
                }
                b'-' | b'=' | b'#' | b':' | b'/' | b'\\' => {
                    if prev.is_none() {
                        return Err(syntax(start, "bond without a preceding atom"));
                    }
                    if pending.is_some() {
                        return Err(syntax(start, "two consecutive bond symbols"));
                    }
                    let kind = match c {
                        b'=' => BondKind::Order(BondOrder::Double),
                        b'#' => BondKind::Order(BondOrder::Triple),
                        b':' => BondKind::Aromatic,
                        _ => BondKind::Order(BondOrder::Single),
                    };
                    pending = Some((kind, start));
                    self.pos += 1;
                }
                b'$' => return Err(syntax(start, "quadruple bonds are not supported")),
                b'.' => return Err(SmilesError::MultiComponent { position: start }),
                b'0'..=b'9' | b'%' => {
                    let Some(p) = prev else {
                        return Err(syntax(start, "ring bond without a preceding atom"));
                    };
                    if branch_open_at.is_some() {
                        return Err(syntax(start, "ring bond at start of branch"));
                    }
                    let label = self.ring_label()?;
                    let kind = pending.take().map(|(k, _)| k);
                    self.ring_bond(p, label, kind, start)?;
                }
                _ => {
                    let atom = self.atom()?;
                    if let Some(p) = prev {
                        let kind = pending.take().map(|(k, _)| k);
                        self.add_bond(p, atom, kind, start)?;
                    } else if pending.is_some() {
                        return Err(syntax(start, "bond without a preceding atom"));
                    }
                    prev = Some(atom);
                    branch_open_at = None;
                }
            }
        }
        if let Some((_, position)) = pending {
            return Err(syntax(position, "dangling bond at end of input"));
        }
        if let Some(p) = branch_open_at {
            return Err(syntax(p, "unterminated branch"));
        }
        if !branches.is_empty() {
            return Err(syntax(self.text.len(), "unbalanced '('"));
        }
        Ok(())
    }

    fn ring_label(&mut self) -> Result<u32, SmilesError> {
        let start = self.pos;
        if self.peek() == Some(b'%') {
            let digits = self.text.get(self.pos + 1..self.pos + 3);
            match digits {
                Some(d) if d.iter().all(u8::is_ascii_digit) => {
                    self.pos += 3;
                    Ok(((d[0] - b'0') * 10 + (d[1] - b'0')) as u32)
                }
                _ => Err(syntax(start, "'%' must be followed by two digits")),
            }
        } else {
            let d = self.peek().expect("caller checked digit");
            self.pos += 1;
            Ok((d - b'0') as u32)
        }
    }

    fn ring_bond(
        &mut self,
        atom: usize,
        label: u32,
        kind: Option<BondKind>,
        position: usize,
    ) -> Result<(), SmilesError> {
        match self.open_rings.remove(&label) {
            None => {
                self.open_rings.insert(label, (atom, kind, position));
                Ok(())
            }
            Some((other, open_kind, _)) => {
                if other == atom {
                    return Err(syntax(position, "ring bond closes on its own atom"));
                }
                let kind = match (open_kind, kind) {
                    (Some(x), Some(y)) if x != y => {
                        return Err(syntax(position, "conflicting ring bond symbols"))
                    }
                    (x, y) => x.or(y),
                };
                self.add_bond(other, atom, kind, position)
            }
        }
    }

    fn add_bond(
        &mut self,
        a: usize,
        b: usize,
        kind: Option<BondKind>,
        position: usize,
    ) -> Result<(), SmilesError> {
        if self
            .bonds
            .iter()
            .any(|x| (x.a == a && x.b == b) || (x.a == b && x.b == a))
        {
            return Err(syntax(position, "duplicate bond between the same atoms"));
        }
        let kind = kind.unwrap_or(if self.atoms[a].aromatic && self.atoms[b].aromatic {
            BondKind::Aromatic
        } else {
            BondKind::Order(BondOrder::Single)
        });
        self.bonds.push(RawBond { a, b, kind });
        Ok(())
    }

    fn push_atom(
        &mut self,
        element: Option<Element>,
        charge: i8,
        aromatic: bool,
        hydrogens: u8,
        position: usize,
    ) -> usize {
        self.atoms.push(RawAtom {
            element,
            charge,
            aromatic,
            hydrogens,
            position,
        });
        self.atoms.len() - 1
    }

    fn atom(&mut self) -> Result<usize, SmilesError> {
        let start = self.pos;
        let c = self.peek().expect("caller checked input");
        if c == b'[' {
            return self.bracket_atom();
        }
        let two = self.text.get(start..start + 2);
        let (element, aromatic, len) = match (c, two) {
            (b'C', Some(b"Cl")) => (Element::Cl, false, 2),
            (b'B', Some(b"Br")) => (Element::Br, false, 2),
            (b'B', _) => (Element::B, false, 1),
            (b'C', _) => (Element::C, false, 1),
            (b'N', _) => (Element::N, false, 1),
            (b'O', _) => (Element::O, false, 1),
            (b'P', _) => (Element::P, false, 1),
            (b'S', _) => (Element::S, false, 1),
            (b'F', _) => (Element::F, false, 1),
            (b'I', _) => (Element::I, false, 1),
            (b'b', _) => (Element::B, true, 1),
            (b'c', _) => (Element::C, true, 1),
            (b'n', _) => (Element::N, true, 1),
            (b'o', _) => (Element::O, true, 1),
            (b'p', _) => (Element::P, true, 1),
            (b's', _) => (Element::S, true, 1),
            _ if c.is_ascii_alphabetic() || c == b'*' => {
                let end = (start + 1..self.text.len())
                    .find(|&i| !self.text[i].is_ascii_lowercase())
                    .unwrap_or(self.text.len())
                    .min(start + 2);
                return Err(SmilesError::UnsupportedElement {
                    position: start,
                    symbol: String::from_utf8_lossy(&self.text[start..end]).into_owned(),
                });
            }
            _ => {
                return Err(syntax(
                    start,
                    format!("unexpected character {:?}", self.char_at(start)),
                ))
            }
        };
        self.pos += len;
        Ok(self.push_atom(Some(element), 0, aromatic, 0, start))
    }

    fn char_at(&self, pos: usize) -> char {
        std::str::from_utf8(&self.text[pos..])
            .ok()
            .and_then(|s| s.chars().next())
            .unwrap_or('\u{fffd}')
    }

    fn bracket_atom(&mut self) -> Result<usize, SmilesError> {
        let open = self.pos;
        self.pos += 1;
        if self.peek().is_some_and(|c| c.is_ascii_digit()) {
            return Err(SmilesError::Isotope { position: self.pos });
        }

        let sym_start = self.pos;
        let rest = &self.text[self.pos..];
        let (element, aromatic, len): (Option<Element>, bool, usize) = if rest.starts_with(b"se") {
            (Some(Element::Se), true, 2)
        } else if rest.first().is_some_and(|c| c.is_ascii_lowercase()) {
            let e = match rest[0] {
                b'b' => Element::B,
                b'c' => Element::C,
                b'n' => Element::N,
                b'o' => Element::O,
                b'p' => Element::P,
                b's' => Element::S,
                _ => return Err(self.unsupported_in_bracket(sym_start)),
            };
            (Some(e), true, 1)
        } else if rest.first().is_some_and(|c| c.is_ascii_uppercase()) {
            let two = rest
                .get(..2)
                .filter(|t| t[1].is_ascii_lowercase())
                .and_then(|t| std::str::from_utf8(t).ok())
                .and_then(|t| t.parse::<Element>().ok());
            if let Some(e) = two {
                (Some(e), false, 2)
            } else if rest[0] == b'H' && !rest.get(1).is_some_and(|c| c.is_ascii_lowercase()) {
                (None, false, 1)
            } else if let Some(e) = std::str::from_utf8(&rest[..1])
                .ok()
                .and_then(|t| t.parse::<Element>().ok())
                .filter(|_| !rest.get(1).is_some_and(|c| c.is_ascii_lowercase()))
            {
                (Some(e), false, 1)
            } else {
                return Err(self.unsupported_in_bracket(sym_start));
            }
        } else if rest.first() == Some(&b'*') {
            return Err(self.unsupported_in_bracket(sym_start));
        } else {
            return Err(syntax(sym_start, "expected element symbol in bracket atom"));
        };
        self.pos += len;

        // Chirality: @, @@, @TH1, @SP2, @OH12 ...
        if self.peek() == Some(b'@') {
            self.pos += 1;
            if self.peek() == Some(b'@') {
                self.pos += 1;
            } else if self.text[self.pos..]
                .get(..2)
                .is_some_and(|t| t.iter().all(u8::is_ascii_uppercase))
            {
                self.pos += 2;
                let digits = self.digits();
                if digits.is_none() {
                    return Err(syntax(self.pos, "chirality class needs a number"));
                }
            }
        }

        let mut hydrogens = 0u8;
        if self.peek() == Some(b'H') {
            self.pos += 1;
            hydrogens = match self.digits() {
                Some(n) if n <= 9 => n as u8,
                Some(_) => return Err(syntax(self.pos, "hydrogen count too large")),
                None => 1,
            };
        }

        let mut charge: i32 = 0;
        if let Some(sign @ (b'+' | b'-')) = self.peek() {
            let unit = if sign == b'+' { 1 } else { -1 };
            self.pos += 1;
            if let Some(n) = self.digits() {
                charge = unit * n as i32;
            } else {
                charge = unit;
                while self.peek() == Some(sign) {
                    self.pos += 1;
                    charge += unit;
                }
            }
        }
        if !(-4..=4).contains(&charge) {
            return Err(syntax(open, format!("formal charge {charge} out of range")));
        }

        if self.peek() == Some(b':') {
            self.pos += 1;
            if self.digits().is_none() {
                return Err(syntax(self.pos, "atom class needs a number"));
            }
        }

        if self.peek() != Some(b']') {
            return Err(syntax(self.pos, "expected ']'"));
        }
        self.pos += 1;

        if element.is_none() && (charge != 0 || hydrogens != 0) {
            return Err(SmilesError::UnsupportedElement {
                position: sym_start,
                symbol: "H".into(),
            });
        }
        Ok(self.push_atom(element, charge as i8, aromatic, hydrogens, open))
    }

    fn unsupported_in_bracket(&self, start: usize) -> SmilesError {
        let end = (start + 1..self.text.len())
            .find(|&i| !self.text[i].is_ascii_lowercase())
            .unwrap_or(self.text.len());
        SmilesError::UnsupportedElement {
            position: start,
            symbol: String::from_utf8_lossy(&self.text[start..end]).into_owned(),
        }
    }

    fn digits(&mut self) -> Option<u32> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return None;
        }
        std::str::from_utf8(&self.text[start..self.pos])
            .ok()?
            .parse()
            .ok()
    }
}

/// Removes explicit `[H]` atoms, adding them to their neighbour's hydrogen
/// count. Each such hydrogen must be singly bonded to exactly one heavy atom.
fn fold_hydrogens(
    atoms: Vec<RawAtom>,
    bonds: Vec<RawBond>,
) -> Result<(Vec<RawAtom>, Vec<RawBond>), SmilesError> {
    if atoms.iter().all(|a| a.element.is_some()) {
        return Ok((atoms, bonds));
    }
    let mut atoms = atoms;
    let mut host: Vec<Option<usize>> = vec![None; atoms.len()];
    let mut degree = vec![0usize; atoms.len()];
    for bond in &bonds {
        degree[bond.a] += 1;
        degree[bond.b] += 1;
        for (h, other) in [(bond.a, bond.b), (bond.b, bond.a)] {
            if atoms[h].element.is_none() {
                if atoms[other].element.is_none() || bond.kind != BondKind::Order(BondOrder::Single)
                {
                    return Err(SmilesError::UnsupportedElement {
                        position: atoms[h].position,
                        symbol: "H".into(),
                    });
                }
                host[h] = Some(other);
            }
        }
    }
    for (i, atom) in atoms.iter().enumerate() {
        if atom.element.is_none() && (degree[i] != 1 || host[i].is_none()) {
            return Err(SmilesError::UnsupportedElement {
                position: atom.position,
                symbol: "H".into(),
            });
        }
    }
    for h in host.iter().flatten() {
        atoms[*h].hydrogens += 1;
    }
    let mut remap = vec![usize::MAX; atoms.len()];
    let mut kept = Vec::new();
    for (i, atom) in atoms.into_iter().enumerate() {
        if atom.element.is_some() {
            remap[i] = kept.len();
            kept.push(atom);
        }
    }
    let bonds = bonds
        .into_iter()
        .filter(|b| remap[b.a] != usize::MAX && remap[b.b] != usize::MAX)
        .map(|b| RawBond {
            a: remap[b.a],
            b: remap[b.b],
            kind: b.kind,
        })
        .collect();
    Ok((kept, bonds))
}

pub(super) fn finalize_bonds(raw: &[RawBond], double: &[bool]) -> Vec<Bond> {
    raw.iter()
        .zip(double)
        .map(|(b, &is_double)| {
            let order = match b.kind {
                BondKind::Order(o) => o,
                BondKind::Aromatic if is_double => BondOrder::Double,
                BondKind::Aromatic => BondOrder::Single,
            };
            Bond::new(b.a, b.b, order)
        })
        .collect()
}

pub(super) fn finalize_atoms(raw: &[RawAtom]) -> Vec<Atom> {
    raw.iter()
        .map(|a| Atom::new(a.element.expect("hydrogens folded"), a.charge))
        .collect()
}
