//! Bunchy and almost bunchy graphs, cycles of bunches, B(G) and O(G).

mod factor;
mod universal;

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{is_strongly_connected, MultiGraph, StateIx};
use crate::hom::minimal_factor;

pub use factor::{max_bunchy_factor, og_almost_bunchy, stability_of_almost_bunchy, BunchyFactor, OgFactor};
pub use universal::{verify_universal_property, UniversalWitness};

/// An ordered pair of Σ_G fibers with two states that each have at least
/// two distinct followers in the second fiber.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AlmostBunchyWitness {
    pub fibers: (StateIx, StateIx),
    pub states: (StateIx, StateIx),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BunchClassification {
    pub sigma: Vec<StateIx>,
    /// `|F(I)| = 1`.
    pub is_bunch: Vec<bool>,
    /// Σ_G is a bijection from F(I) onto F(Σ_G(I)).
    pub bunchy_state: Vec<bool>,
    pub bunchy: bool,
    pub almost_bunchy: bool,
    pub cycle_of_bunches: bool,
    pub witness: Option<AlmostBunchyWitness>,
}

pub fn classify(g: &MultiGraph) -> Result<BunchClassification> {
    let mf = minimal_factor(g)?;
    let m = &mf.graph;
    let sigma = mf.sigma.clone();
    let is_bunch: Vec<bool> = g.states().map(|s| g.followers(s).len() == 1).collect();
    // Σ_G maps F(I) onto F(Σ_G(I)), so equal sizes mean a bijection.
    let bunchy_state: Vec<bool> =
        g.states().map(|s| g.followers(s).len() == m.followers(sigma[s]).len()).collect();
    let mut witness = None;
    'pairs: for i in m.states() {
        for j in m.followers(i) {
            let offenders: Vec<StateIx> = mf
                .fiber(i)
                .into_iter()
                .filter(|&s| g.followers(s).iter().filter(|&&t| sigma[t] == j).count() >= 2)
                .collect();
            if offenders.len() >= 2 {
                witness = Some(AlmostBunchyWitness { fibers: (i, j), states: (offenders[0], offenders[1]) });
                break 'pairs;
            }
        }
    }
    let bunchy = bunchy_state.iter().all(|&b| b);
    let cycle_of_bunches = as_cycle_of_bunches(g).is_some();
    Ok(BunchClassification {
        sigma,
        is_bunch,
        bunchy_state,
        bunchy,
        almost_bunchy: witness.is_none(),
        cycle_of_bunches,
        witness,
    })
}

/// A strongly connected graph in which every state has one follower,
/// described by its out-degrees read around the cycle from state 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CycleOfBunches {
    pub degree_sequence: Vec<usize>,
    /// The sequence is not a proper cyclic power of a shorter one.
    pub is_minimal: bool,
}

impl CycleOfBunches {
    pub fn new(degree_sequence: Vec<usize>) -> Self {
        let is_minimal = primitive_period(&degree_sequence) == degree_sequence.len();
        Self { degree_sequence, is_minimal }
    }

    pub fn period(&self) -> usize {
        self.degree_sequence.len()
    }

    /// The shortest block `B` with `sequence = B^q`, and `q`.
    pub fn primitive(&self) -> (CycleOfBunches, usize) {
        let d = primitive_period(&self.degree_sequence);
        (CycleOfBunches::new(self.degree_sequence[..d].to_vec()), self.degree_sequence.len() / d)
    }

    /// Same cycle up to rotation.
    pub fn is_rotation_of(&self, other: &CycleOfBunches) -> bool {
        let p = self.period();
        p == other.period()
            && (0..p).any(|r| (0..p).all(|i| self.degree_sequence[(i + r) % p] == other.degree_sequence[i]))
    }
}

fn primitive_period(seq: &[usize]) -> usize {
    let p = seq.len();
    (1..=p).find(|&d| p.is_multiple_of(d) && (0..p).all(|i| seq[i] == seq[(i + d) % p])).unwrap_or(p)
}

pub fn as_cycle_of_bunches(g: &MultiGraph) -> Option<CycleOfBunches> {
    if !is_strongly_connected(g) || g.states().any(|s| g.followers(s).len() != 1) {
        return None;
    }
    let mut seq = Vec::with_capacity(g.num_states());
    let mut s = 0;
    for _ in 0..g.num_states() {
        seq.push(g.out_degree(s));
        s = g.followers(s)[0];
    }
    Some(CycleOfBunches::new(seq))
}

/// O_{M,q}: the cycle of bunches repeating M's degree sequence q times.
/// States are `0..pq`, edges `e0, e1, ...`.
pub fn build_o(m: &CycleOfBunches, q: usize) -> Result<MultiGraph> {
    if !m.is_minimal {
        return Err(Error::Precondition(format!("{:?} is a proper cyclic power", m.degree_sequence)));
    }
    if q == 0 || m.degree_sequence.is_empty() {
        return Err(Error::Precondition("O_{M,q} needs q >= 1 and a nonempty cycle".into()));
    }
    let n = m.period() * q;
    let counts: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            let mut row = vec![0; n];
            row[(i + 1) % n] += m.degree_sequence[i % m.period()];
            row
        })
        .collect();
    MultiGraph::from_counts(&counts)
}

/// Shared helper: classify, and fail unless almost bunchy.
pub(crate) fn require_almost_bunchy(g: &Arc<MultiGraph>) -> Result<BunchClassification> {
    let c = classify(g)?;
    match &c.witness {
        None => Ok(c),
        Some(w) => Err(Error::Precondition(format!(
            "graph is not almost bunchy: `{}` and `{}` both branch into one fiber",
            g.state_id(w.states.0),
            g.state_id(w.states.1)
        ))),
    }
}
