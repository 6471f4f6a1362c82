use std::sync::Arc;

use super::colouring::TotalOrderColouring;
use super::stable::{find_nontrivial_stability, SearchConfig, StabilitySource};
use super::ResolverChain;
use crate::bunchy::{as_cycle_of_bunches, classify, CycleOfBunches};
use crate::error::{Error, Result};
use crate::graph::{is_strongly_connected, period, EdgeIx, MultiGraph};
use crate::hom::{minimal_factor, quotient, RightResolver};
use crate::stability::{is_synchronizing, synchronizing_word};

/// One quotient step of the recursion.
#[derive(Debug, Clone)]
pub struct SyncStep {
    pub source: StabilitySource,
    pub states_before: usize,
    pub states_after: usize,
    pub colourings_evaluated: u64,
}

#[derive(Debug, Clone)]
pub struct CycleSynchronization {
    /// `O_{M,q}` as reached by the recursion.
    pub target: Arc<MultiGraph>,
    pub minimal: CycleOfBunches,
    pub q: usize,
    pub chain: ResolverChain,
    /// The composed chain; verified synchronizing.
    pub synchronizer: RightResolver,
    pub steps: Vec<SyncStep>,
}

/// Repeatedly quotient by a nontrivial stability relation until the graph
/// is bunchy, which for these graphs means it is `O_{M,q}` with
/// `q = per(G)/per(M)`.
pub fn synchronize_to_cycle_of_bunches(g: &Arc<MultiGraph>, config: &SearchConfig) -> Result<CycleSynchronization> {
    if !is_strongly_connected(g) {
        return Err(Error::NotStronglyConnected);
    }
    let mf = minimal_factor(g)?;
    let minimal = as_cycle_of_bunches(&mf.graph)
        .ok_or_else(|| Error::Precondition("M(G) is not a cycle of bunches".into()))?;
    let q = period(g)? / minimal.period();
    let mut chain = ResolverChain::new(g.clone());
    let mut steps = Vec::new();
    let mut current = g.clone();
    while !classify(&current)?.bunchy {
        let found = find_nontrivial_stability(&current, config)?;
        let step = quotient(&found.relation.partition, &found.resolver)?;
        steps.push(SyncStep {
            source: found.source,
            states_before: current.num_states(),
            states_after: step.graph.num_states(),
            colourings_evaluated: found.colourings_evaluated,
        });
        chain.push(step.quotient_map)?;
        current = step.graph;
    }
    let synchronizer = chain.compose()?;
    if !is_synchronizing(&synchronizer)? {
        return Err(Error::Verification("composed chain is not synchronizing".into()));
    }
    let reached = as_cycle_of_bunches(&current)
        .ok_or_else(|| Error::Verification("bunchy endpoint is not a cycle of bunches".into()))?;
    let expected = CycleOfBunches::new(minimal.degree_sequence.repeat(q));
    if !reached.is_rotation_of(&expected) {
        return Err(Error::Verification(format!(
            "endpoint has degrees {:?}, expected a rotation of {:?}",
            reached.degree_sequence, expected.degree_sequence
        )));
    }
    Ok(CycleSynchronization { target: current, minimal, q, chain, synchronizer, steps })
}

/// A road colouring of a strongly connected graph of constant out-degree
/// `D`: a colouring onto `O_{D,p}`, synchronizing when `p = 1`.
#[derive(Debug, Clone)]
pub struct RoadColouring {
    pub out_degree: usize,
    pub period: usize,
    pub colouring: TotalOrderColouring,
    /// Recomputed by the stability search on the final colouring.
    pub synchronizing: bool,
    /// Collapses the fiber over the first state of `O_{D,p}`.
    pub word: Vec<EdgeIx>,
    pub steps: Vec<SyncStep>,
}

pub fn road_colour(g: &Arc<MultiGraph>, config: &SearchConfig) -> Result<RoadColouring> {
    let out_degree = g
        .constant_out_degree()
        .ok_or_else(|| Error::Precondition("road colouring needs constant out-degree".into()))?;
    let sync = synchronize_to_cycle_of_bunches(g, config)?;
    let colouring = TotalOrderColouring::from_resolver(&sync.synchronizer)?;
    let synchronizing = is_synchronizing(colouring.resolver())?;
    if !synchronizing {
        return Err(Error::Verification("road colouring is not synchronizing".into()));
    }
    let word = synchronizing_word(colouring.resolver(), 0)?;
    Ok(RoadColouring { out_degree, period: sync.q, colouring, synchronizing, word, steps: sync.steps })
}
