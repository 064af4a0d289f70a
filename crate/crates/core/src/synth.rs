//! Seeded random molecules for fuzzing and benchmarks.
//!
//! Molecules grow by attaching atoms, pendant rings, fused rings and spiro
//! rings to atoms with spare valence, then receive a few bond-order
//! upgrades and charges. Every result satisfies the valence table and is
//! connected.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::element::Element;
use crate::molecule::{Atom, Bond, BondOrder, Molecule};
use crate::rings::perceive_rings;
use crate::smiles::{parse_smiles, write_smiles};

#[derive(Debug, Clone, Copy)]
pub struct SynthConfig {
    pub max_atoms: usize,
    /// Probability that a growth step adds a ring instead of one atom.
    pub ring_rate: f64,
    /// Probability of a formal charge on an eligible atom.
    pub charge_rate: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            max_atoms: 30,
            ring_rate: 0.3,
            charge_rate: 0.04,
        }
    }
}

struct Builder {
    atoms: Vec<Atom>,
    bonds: Vec<Bond>,
    used: Vec<u8>,
}

impl Builder {
    fn free(&self, a: usize) -> u8 {
        self.atoms[a].max_valence().saturating_sub(self.used[a])
    }

    fn add_atom(&mut self, element: Element) -> usize {
        self.atoms.push(Atom::new(element, 0));
        self.used.push(0);
        self.atoms.len() - 1
    }

    fn bond(&mut self, a: usize, b: usize) {
        self.bonds.push(Bond::new(a, b, BondOrder::Single));
        self.used[a] += 1;
        self.used[b] += 1;
    }

    /// Atoms with at least `need` spare valence.
    fn sites(&self, need: u8) -> Vec<usize> {
        (0..self.atoms.len())
            .filter(|&a| self.free(a) >= need)
            .collect()
    }

    fn ring_element(rng: &mut ChaCha8Rng) -> Element {
        *[
            (Element::C, 80),
            (Element::N, 12),
            (Element::O, 4),
            (Element::S, 3),
            (Element::Se, 1),
        ]
        .choose_weighted(rng, |x| x.1)
        .map(|x| &x.0)
        .unwrap()
    }

    /// A fresh ring of `size` atoms; returns its first atom, always a
    /// carbon so it can take a substituent. Six-rings are sometimes built
    /// as Kekule benzene or pyridine rings.
    fn new_ring(&mut self, rng: &mut ChaCha8Rng, size: usize) -> usize {
        let first = self.add_atom(Element::C);
        if size == 6 && rng.gen_bool(0.5) {
            let mut prev = first;
            for i in 1..=6 {
                let x = if i == 6 {
                    first
                } else if rng.gen_bool(0.15) {
                    self.add_atom(Element::N)
                } else {
                    self.add_atom(Element::C)
                };
                let order = if i % 2 == 1 {
                    BondOrder::Double
                } else {
                    BondOrder::Single
                };
                self.bonds.push(Bond::new(prev, x, order));
                self.used[prev] += order.value();
                self.used[x] += order.value();
                prev = x;
            }
            return first;
        }
        self.ring_path(rng, first, first, size - 1);
        first
    }

    /// A path of `len` new ring atoms from `a` to `b` (which may be equal
    /// for a spiro ring).
    fn ring_path(&mut self, rng: &mut ChaCha8Rng, a: usize, b: usize, len: usize) {
        let mut prev = a;
        for _ in 0..len {
            let e = Builder::ring_element(rng);
            let x = self.add_atom(e);
            self.bond(prev, x);
            prev = x;
        }
        self.bond(prev, b);
    }
}

fn chain_element(rng: &mut ChaCha8Rng) -> Element {
    *[
        (Element::C, 60),
        (Element::N, 12),
        (Element::O, 12),
        (Element::S, 3),
        (Element::F, 3),
        (Element::Cl, 3),
        (Element::Br, 2),
        (Element::I, 1),
        (Element::P, 1),
        (Element::B, 1),
        (Element::Si, 1),
        (Element::Se, 1),
    ]
    .choose_weighted(rng, |x| x.1)
    .map(|x| &x.0)
    .unwrap()
}

fn ring_size(rng: &mut ChaCha8Rng) -> usize {
    *[(3, 4), (4, 3), (5, 30), (6, 50), (7, 8), (8, 5)]
        .choose_weighted(rng, |x| x.1)
        .map(|x| &x.0)
        .unwrap()
}

/// One random molecule with between 1 and `config.max_atoms` heavy atoms.
pub fn random_molecule(rng: &mut ChaCha8Rng, config: &SynthConfig) -> Molecule {
    let target = rng.gen_range(1..=config.max_atoms.max(1));
    let mut b = Builder {
        atoms: Vec::new(),
        bonds: Vec::new(),
        used: Vec::new(),
    };
    if target >= 3 && rng.gen_bool(config.ring_rate) {
        let size = ring_size(rng).min(target);
        b.new_ring(rng, size);
    } else {
        b.add_atom(chain_element(rng));
    }
    let mut steps = 0;
    while b.atoms.len() < target && steps < 10 * target {
        steps += 1;
        let room = target - b.atoms.len();
        let roll: f64 = rng.gen();
        if room >= 2 && roll < config.ring_rate {
            let size = ring_size(rng);
            let kind = rng.gen_range(0..3);
            if kind == 0 && size <= room {
                // Pendant ring: a new ring bonded to an existing atom.
                let Some(&site) = b.sites(1).choose(rng) else {
                    break;
                };
                let start = b.new_ring(rng, size);
                b.bond(site, start);
            } else if kind == 1 && size - 2 <= room {
                // Fused ring across an existing ring bond.
                let ring =
                    perceive_rings(&Molecule::unchecked(b.atoms.clone(), b.bonds.clone()).unwrap());
                let options: Vec<Bond> = b
                    .bonds
                    .iter()
                    .enumerate()
                    .filter(|(i, bd)| {
                        ring.bond_in_ring[*i] && b.free(bd.a) >= 1 && b.free(bd.b) >= 1
                    })
                    .map(|(_, bd)| *bd)
                    .collect();
                let Some(&bond) = options.choose(rng) else {
                    continue;
                };
                b.ring_path(rng, bond.a, bond.b, size - 2);
            } else if size - 1 <= room {
                // Spiro ring through one atom.
                let sites: Vec<usize> = b
                    .sites(2)
                    .into_iter()
                    .filter(|&a| b.atoms[a].element == Element::C)
                    .collect();
                let Some(&site) = sites.choose(rng) else {
                    continue;
                };
                b.ring_path(rng, site, site, size - 1);
            }
        } else {
            let Some(&site) = b.sites(1).choose(rng) else {
                break;
            };
            let x = b.add_atom(chain_element(rng));
            b.bond(site, x);
        }
    }
    upgrade_bonds(rng, &mut b);
    add_charges(rng, &mut b, config.charge_rate);
    Molecule::new(b.atoms, b.bonds).expect("generator respects valences")
}

fn upgrade_bonds(rng: &mut ChaCha8Rng, b: &mut Builder) {
    let ring = perceive_rings(&Molecule::unchecked(b.atoms.clone(), b.bonds.clone()).unwrap());
    let mut order: Vec<usize> = (0..b.bonds.len()).collect();
    order.shuffle(rng);
    for i in order {
        let bond = b.bonds[i];
        let in_ring = ring.bond_in_ring[i];
        let p = if in_ring { 0.3 } else { 0.15 };
        if !rng.gen_bool(p) || b.free(bond.a) < 1 || b.free(bond.b) < 1 {
            continue;
        }
        let next = match bond.order {
            BondOrder::Single => BondOrder::Double,
            BondOrder::Double if !in_ring => BondOrder::Triple,
            _ => continue,
        };
        b.bonds[i].order = next;
        b.used[bond.a] += 1;
        b.used[bond.b] += 1;
    }
}

fn add_charges(rng: &mut ChaCha8Rng, b: &mut Builder, rate: f64) {
    for a in 0..b.atoms.len() {
        if !rng.gen_bool(rate) {
            continue;
        }
        let atom = b.atoms[a];
        let used = b.used[a];
        let charged = match atom.element {
            Element::N => Atom::new(Element::N, 1),
            Element::O if used <= 1 => Atom::new(Element::O, -1),
            Element::S if used <= 1 => Atom::new(Element::S, -1),
            Element::C if used <= 3 => Atom::new(Element::C, -1),
            _ => continue,
        };
        if used <= charged.max_valence() {
            b.atoms[a] = charged;
        }
    }
}

/// `n` random molecules, each paired with SMILES text that parses back to
/// it (so the molecules carry their source).
pub fn random_corpus(seed: u64, n: usize, config: &SynthConfig) -> Vec<Molecule> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let mol = random_molecule(&mut rng, config);
            let smiles = write_smiles(&mol);
            parse_smiles(&smiles)
                .expect("canonical SMILES of a generated molecule parses")
                .with_source(smiles)
        })
        .collect()
}
