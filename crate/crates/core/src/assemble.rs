//! Turning a scored bond graph into a molecule: valency correction and
//! cycle breaking.
//!
//! The input is a set of fixed motifs (atoms plus their internal bonds) and
//! a list of candidate bonds with confidences between motifs and single
//! atoms. Valency correction accepts candidates greedily by confidence
//! while every atom stays within its valence. Cycle breaking then deletes
//! low-confidence inter-motif bonds until every smallest ring that uses
//! one has five or six atoms and no two such rings share more than two
//! atoms. Rings entirely inside one motif are left alone.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::molecule::{Atom, Bond, BondOrder, Molecule, MoleculeError};
use crate::rings::perceive_rings;

#[derive(Debug, Copy, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub u: usize,
    pub v: usize,
    pub order: BondOrder,
    pub confidence: f64,
}

impl Candidate {
    /// Normalises the endpoints so that `u < v`.
    pub fn new(u: usize, v: usize, order: BondOrder, confidence: f64) -> Candidate {
        let (u, v) = if u <= v { (u, v) } else { (v, u) };
        Candidate {
            u,
            v,
            order,
            confidence,
        }
    }

    fn bond(&self) -> Bond {
        Bond::new(self.u, self.v, self.order)
    }

    /// Greedy order: confidence descending, then (u, v, order) ascending.
    fn greedy_cmp(&self, other: &Candidate) -> Ordering {
        other
            .confidence
            .total_cmp(&self.confidence)
            .then((self.u, self.v, self.order).cmp(&(other.u, other.v, other.order)))
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AssembleError {
    #[error("motif atom {0} is outside the atom list")]
    MotifAtomOutOfRange(usize),
    #[error("atom {0} belongs to more than one motif")]
    MotifOverlap(usize),
    #[error("motif bond {a}-{b} does not lie inside a single motif")]
    MotifBond { a: usize, b: usize },
    #[error("invalid motif structure: {0}")]
    Structure(#[from] MoleculeError),
    #[error("candidate {u}-{v} references a missing atom")]
    CandidateOutOfRange { u: usize, v: usize },
    #[error("candidate {0}-{0} is a self loop")]
    CandidateSelfLoop(usize),
    #[error("candidate {u}-{v} joins two atoms of the same motif")]
    CandidateIntra { u: usize, v: usize },
    #[error("candidate {u}-{v} has confidence {value} outside [0, 1]")]
    Confidence { u: usize, v: usize, value: f64 },
    #[error("duplicate candidate {u}-{v} of order {order}")]
    DuplicateCandidate { u: usize, v: usize, order: u8 },
}

/// Fixed motifs plus scored candidate bonds over the same atom list.
#[derive(Debug, Clone)]
pub struct ScoredBondGraph {
    atoms: Vec<Atom>,
    motif_of: Vec<Option<usize>>,
    intra: Vec<Bond>,
    candidates: Vec<Candidate>,
}

impl ScoredBondGraph {
    /// `motifs` lists each motif's atoms and internal bonds.
    pub fn new(
        atoms: Vec<Atom>,
        motifs: &[(Vec<usize>, Vec<Bond>)],
        candidates: Vec<Candidate>,
    ) -> Result<ScoredBondGraph, AssembleError> {
        let n = atoms.len();
        let mut motif_of = vec![None; n];
        let mut intra = Vec::new();
        for (i, (members, bonds)) in motifs.iter().enumerate() {
            for &a in members {
                if a >= n {
                    return Err(AssembleError::MotifAtomOutOfRange(a));
                }
                if motif_of[a].replace(i).is_some() {
                    return Err(AssembleError::MotifOverlap(a));
                }
            }
            for b in bonds {
                let inside = |x: usize| x < n && motif_of[x] == Some(i);
                if !inside(b.a) || !inside(b.b) {
                    return Err(AssembleError::MotifBond { a: b.a, b: b.b });
                }
                intra.push(Bond::new(b.a, b.b, b.order));
            }
        }
        // Checks duplicates, loops and valence of the fixed part.
        Molecule::new(atoms.clone(), intra.clone())?;
        let mut seen = std::collections::HashSet::new();
        for c in &candidates {
            if c.u >= n || c.v >= n {
                return Err(AssembleError::CandidateOutOfRange { u: c.u, v: c.v });
            }
            if c.u == c.v {
                return Err(AssembleError::CandidateSelfLoop(c.u));
            }
            if motif_of[c.u].is_some() && motif_of[c.u] == motif_of[c.v] {
                return Err(AssembleError::CandidateIntra { u: c.u, v: c.v });
            }
            if !(c.confidence.is_finite() && (0.0..=1.0).contains(&c.confidence)) {
                return Err(AssembleError::Confidence {
                    u: c.u,
                    v: c.v,
                    value: c.confidence,
                });
            }
            let (u, v) = (c.u.min(c.v), c.u.max(c.v));
            if !seen.insert((u, v, c.order)) {
                return Err(AssembleError::DuplicateCandidate {
                    u,
                    v,
                    order: c.order.value(),
                });
            }
        }
        let candidates = candidates
            .into_iter()
            .map(|c| Candidate::new(c.u, c.v, c.order, c.confidence))
            .collect();
        Ok(ScoredBondGraph {
            atoms,
            motif_of,
            intra,
            candidates,
        })
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn intra_bonds(&self) -> &[Bond] {
        &self.intra
    }

    pub fn candidates(&self) -> &[Candidate] {
        &self.candidates
    }

    /// Motif index of every atom, `None` for single atoms.
    pub fn motif_of(&self) -> &[Option<usize>] {
        &self.motif_of
    }
}

/// Accepts candidates by descending confidence (ties: smaller (u, v, order))
/// whenever both endpoints have enough valence left and the pair is not
/// bonded yet. Returns the accepted candidates in acceptance order.
pub fn valency_correct(g: &ScoredBondGraph) -> Vec<Candidate> {
    accept_greedy(g, g.candidates.iter().copied())
}

fn accept_greedy(
    g: &ScoredBondGraph,
    candidates: impl Iterator<Item = Candidate>,
) -> Vec<Candidate> {
    let mut remaining: Vec<i16> = g.atoms.iter().map(|a| a.max_valence() as i16).collect();
    let mut bonded = std::collections::HashSet::new();
    for b in &g.intra {
        remaining[b.a] -= b.order.value() as i16;
        remaining[b.b] -= b.order.value() as i16;
        bonded.insert((b.a, b.b));
    }
    let mut sorted: Vec<Candidate> = candidates.collect();
    sorted.sort_by(Candidate::greedy_cmp);
    let mut accepted = Vec::new();
    for c in sorted {
        let need = c.order.value() as i16;
        if remaining[c.u] >= need && remaining[c.v] >= need && !bonded.contains(&(c.u, c.v)) {
            remaining[c.u] -= need;
            remaining[c.v] -= need;
            bonded.insert((c.u, c.v));
            accepted.push(c);
        }
    }
    accepted
}

/// A rule broken by a smallest ring that uses at least one inter-motif bond.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CycleViolation {
    /// The ring has a size other than five or six.
    Size { atoms: Vec<usize> },
    /// Two such rings share more than two atoms.
    Shared {
        first: Vec<usize>,
        second: Vec<usize>,
        shared: usize,
    },
}

/// Lists violations among the smallest rings of `mol` that contain a bond
/// not flagged in `intra`.
pub fn cycle_violations(mol: &Molecule, intra: &[bool]) -> Vec<CycleViolation> {
    let extra = extra_rings(mol, intra);
    let mut out = Vec::new();
    for ring in &extra {
        if !matches!(ring.len(), 5 | 6) {
            out.push(CycleViolation::Size {
                atoms: ring.clone(),
            });
        }
    }
    for i in 0..extra.len() {
        for j in i + 1..extra.len() {
            let shared = shared_atoms(&extra[i], &extra[j]);
            if shared > 2 {
                out.push(CycleViolation::Shared {
                    first: extra[i].clone(),
                    second: extra[j].clone(),
                    shared,
                });
            }
        }
    }
    out
}

/// Sorted atom sets of the smallest rings that use a non-intra bond, paired
/// with those bonds.
fn extra_rings_with_bonds(mol: &Molecule, intra: &[bool]) -> Vec<(Vec<usize>, Vec<usize>)> {
    perceive_rings(mol)
        .rings
        .into_iter()
        .filter_map(|r| {
            let inter: Vec<usize> = r.bonds.iter().copied().filter(|&b| !intra[b]).collect();
            if inter.is_empty() {
                return None;
            }
            let mut atoms = r.atoms;
            atoms.sort_unstable();
            Some((atoms, inter))
        })
        .collect()
}

fn extra_rings(mol: &Molecule, intra: &[bool]) -> Vec<Vec<usize>> {
    extra_rings_with_bonds(mol, intra)
        .into_iter()
        .map(|(a, _)| a)
        .collect()
}

fn shared_atoms(a: &[usize], b: &[usize]) -> usize {
    a.iter().filter(|x| b.binary_search(x).is_ok()).count()
}

/// Outcome of [`cycle_break`].
#[derive(Debug, Clone)]
pub struct CycleBreak {
    pub molecule: Molecule,
    /// Flags of the surviving bonds, in the order of `molecule.bonds()`.
    pub intra: Vec<bool>,
    pub confidence: Vec<f64>,
    /// Deleted bonds in deletion order.
    pub removed: Vec<Bond>,
}

/// Deletes inter-motif bonds until [`cycle_violations`] is empty. Each round
/// recomputes the smallest rings, looks at every ring involved in a
/// violation, and deletes the lowest-confidence inter-motif bond found on
/// any of them (ties: smaller atom pair). Bonds flagged in `intra` are
/// never deleted; every violating ring holds at least one other bond, so
/// the loop always makes progress.
pub fn cycle_break(mol: &Molecule, intra: &[bool], confidence: &[f64]) -> CycleBreak {
    assert_eq!(intra.len(), mol.bond_count(), "one intra flag per bond");
    assert_eq!(
        confidence.len(),
        mol.bond_count(),
        "one confidence per bond"
    );
    let mut mol = mol.clone();
    let mut intra = intra.to_vec();
    let mut confidence = confidence.to_vec();
    let mut removed = Vec::new();
    loop {
        let rings = extra_rings_with_bonds(&mol, &intra);
        let mut bad = vec![false; rings.len()];
        for (i, (atoms, _)) in rings.iter().enumerate() {
            if !matches!(atoms.len(), 5 | 6) {
                bad[i] = true;
            }
        }
        for i in 0..rings.len() {
            for j in i + 1..rings.len() {
                if shared_atoms(&rings[i].0, &rings[j].0) > 2 {
                    bad[i] = true;
                    bad[j] = true;
                }
            }
        }
        let victim = rings
            .iter()
            .zip(&bad)
            .filter(|(_, &b)| b)
            .flat_map(|((_, bonds), _)| bonds.iter().copied())
            .min_by(|&x, &y| {
                confidence[x].total_cmp(&confidence[y]).then_with(|| {
                    let (bx, by) = (mol.bond(x), mol.bond(y));
                    (bx.a, bx.b).cmp(&(by.a, by.b))
                })
            });
        let Some(victim) = victim else { break };
        removed.push(mol.bond(victim));
        mol = mol.without_bonds(&[victim]);
        intra.remove(victim);
        confidence.remove(victim);
    }
    CycleBreak {
        molecule: mol,
        intra,
        confidence,
        removed,
    }
}

/// Which post-processing step runs first.
#[derive(Debug, Copy, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AssembleOrder {
    #[default]
    ValencyFirst,
    CycleFirst,
}

impl AssembleOrder {
    pub fn as_str(self) -> &'static str {
        match self {
            AssembleOrder::ValencyFirst => "valency-first",
            AssembleOrder::CycleFirst => "cycle-first",
        }
    }
}

impl fmt::Display for AssembleOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AssembleOrder {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "valency-first" => Ok(AssembleOrder::ValencyFirst),
            "cycle-first" => Ok(AssembleOrder::CycleFirst),
            other => Err(format!(
                "unknown order `{other}` (expected valency-first or cycle-first)"
            )),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Assembled {
    pub molecule: Molecule,
    /// Candidate bonds present in the result.
    pub accepted: Vec<Bond>,
    /// Bonds deleted by cycle breaking.
    pub removed: Vec<Bond>,
    pub connected: bool,
}

/// Runs both post-processing steps in the requested order.
///
/// Cycle-first breaks cycles on the best-scoring candidate per atom pair,
/// corrects valences among the survivors, then breaks cycles once more:
/// dropping bonds can change the smallest-ring basis.
pub fn assemble(g: &ScoredBondGraph, order: AssembleOrder) -> Assembled {
    let mut removed = Vec::new();
    let accepted = match order {
        AssembleOrder::ValencyFirst => valency_correct(g),
        AssembleOrder::CycleFirst => {
            let mut best: std::collections::BTreeMap<(usize, usize), Candidate> =
                Default::default();
            for c in &g.candidates {
                let slot = best.entry((c.u, c.v)).or_insert(*c);
                if c.greedy_cmp(slot) == Ordering::Less {
                    *slot = *c;
                }
            }
            let chosen: Vec<Candidate> = best.into_values().collect();
            let pruned = break_with(g, &chosen);
            removed.extend(pruned.removed.iter().copied());
            let survivors: std::collections::HashSet<(usize, usize)> = pruned
                .molecule
                .bonds()
                .iter()
                .zip(&pruned.intra)
                .filter(|(_, &i)| !i)
                .map(|(b, _)| (b.a, b.b))
                .collect();
            accept_greedy(
                g,
                g.candidates
                    .iter()
                    .copied()
                    .filter(|c| survivors.contains(&(c.u, c.v))),
            )
        }
    };
    let broken = break_with(g, &accepted);
    removed.extend(broken.removed.iter().copied());
    let molecule = Molecule::new(
        broken.molecule.atoms().to_vec(),
        broken.molecule.bonds().to_vec(),
    )
    .expect("valency correction keeps every atom within its valence");
    let kept: Vec<Bond> = molecule
        .bonds()
        .iter()
        .zip(&broken.intra)
        .filter(|(_, &i)| !i)
        .map(|(b, _)| *b)
        .collect();
    let connected = molecule.is_connected();
    if !connected {
        log::warn!(
            "assembled graph has {} components",
            molecule.components().len()
        );
    }
    Assembled {
        molecule,
        accepted: kept,
        removed,
        connected,
    }
}

fn break_with(g: &ScoredBondGraph, candidates: &[Candidate]) -> CycleBreak {
    let mut bonds = g.intra.clone();
    let mut intra = vec![true; bonds.len()];
    let mut confidence = vec![1.0; bonds.len()];
    for c in candidates {
        bonds.push(c.bond());
        intra.push(false);
        confidence.push(c.confidence);
    }
    let mol = Molecule::unchecked(g.atoms.clone(), bonds).expect("candidates are validated");
    cycle_break(&mol, &intra, &confidence)
}
