//! Stable-pair discovery, the cycle-of-bunches synchronization recursion,
//! road colouring, O(G) isomorphism deciders and the conjecture probe.

mod colouring;
mod decide;
mod probe;
mod road;
mod stable;

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graph::MultiGraph;
use crate::hom::RightResolver;

pub use colouring::{tree_analysis, TotalOrderColouring, TreeAnalysis};
pub use decide::{decide_og_iso_bfc, decide_og_iso_bunchy, OgIsoDecision, OgIsoSummary};
pub use probe::{probe_bunchy_factor_conjecture, resolver_classes, ProbeReport, ProbeVerdict, ResolverClasses};
pub use road::{road_colour, synchronize_to_cycle_of_bunches, CycleSynchronization, RoadColouring, SyncStep};
pub use stable::{
    find_nontrivial_stability, in_amalgamation_stable_pair, NontrivialStability, SearchConfig, StabilitySource,
};

/// A factorization `G → G₁ → … → H`, composed on demand.
#[derive(Debug, Clone)]
pub struct ResolverChain {
    start: Arc<MultiGraph>,
    steps: Vec<RightResolver>,
}

impl ResolverChain {
    pub fn new(start: Arc<MultiGraph>) -> Self {
        Self { start, steps: Vec::new() }
    }

    pub fn domain(&self) -> &Arc<MultiGraph> {
        &self.start
    }

    pub fn codomain(&self) -> &Arc<MultiGraph> {
        self.steps.last().map_or(&self.start, |s| s.codomain())
    }

    pub fn steps(&self) -> &[RightResolver] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Appends a step whose domain is the current codomain.
    pub fn push(&mut self, step: RightResolver) -> Result<()> {
        if step.domain() != self.codomain() {
            return Err(Error::Mismatch("chain step does not start at the current codomain".into()));
        }
        self.steps.push(step);
        Ok(())
    }

    /// The composite; the identity for an empty chain.
    pub fn compose(&self) -> Result<RightResolver> {
        self.steps
            .iter()
            .try_fold(RightResolver::identity(self.start.clone()), |acc, step| step.compose(&acc))
    }
}
