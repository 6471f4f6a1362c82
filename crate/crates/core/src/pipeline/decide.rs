use std::sync::Arc;

use serde::Serialize;

use crate::bunchy::{classify, max_bunchy_factor};
use crate::error::{Error, Result};
use crate::graph::{is_strongly_connected, principal_components, MultiGraph, StateIx};
use crate::hom::{construct_right_resolver, minimal_factor, GraphHom, RightResolver};
use crate::stability::{fiber_product, is_synchronizing, SyncExtension};

/// Outcome of an O(G) isomorphism decision.
#[derive(Debug, Clone)]
pub struct OgIsoDecision {
    pub isomorphic: bool,
    /// Set when the answer depends on the bunchy factor conjecture.
    pub conditional: bool,
    pub minimal_factors_agree: bool,
    pub components_checked: usize,
    /// The principal component of the fiber product that synchronizes
    /// onto both inputs, if any.
    pub witness: Option<SyncExtension>,
    /// Product states of the witness component.
    pub witness_states: Vec<StateIx>,
}

#[derive(Debug, Clone, Serialize)]
pub struct OgIsoSummary {
    pub isomorphic: bool,
    pub conditional: bool,
    pub minimal_factors_agree: bool,
    pub components_checked: usize,
    pub witness_states: Option<usize>,
}

impl OgIsoDecision {
    pub fn summary(&self) -> OgIsoSummary {
        OgIsoSummary {
            isomorphic: self.isomorphic,
            conditional: self.conditional,
            minimal_factors_agree: self.minimal_factors_agree,
            components_checked: self.components_checked,
            witness_states: self.witness.as_ref().map(|w| w.graph.num_states()),
        }
    }
}

/// Unconditional decider, for strongly connected bunchy inputs.
///
/// Both positional-matching resolvers land on the canonically labelled M, so equal
/// minimal factors are literally equal graphs and Φ2 can be read as a map
/// onto Φ1's codomain.
pub fn decide_og_iso_bunchy(g1: &Arc<MultiGraph>, g2: &Arc<MultiGraph>) -> Result<OgIsoDecision> {
    for (k, g) in [(1, g1), (2, g2)] {
        if !is_strongly_connected(g) {
            return Err(Error::Precondition(format!("G{k} is not strongly connected")));
        }
        if !classify(g)?.bunchy {
            return Err(Error::Precondition(format!("G{k} is not bunchy")));
        }
    }
    let (mf1, mf2) = (minimal_factor(g1)?, minimal_factor(g2)?);
    if mf1.graph != mf2.graph {
        return Ok(OgIsoDecision {
            isomorphic: false,
            conditional: false,
            minimal_factors_agree: false,
            components_checked: 0,
            witness: None,
            witness_states: Vec::new(),
        });
    }
    let phi1 = construct_right_resolver(g1, &mf1, None)?;
    let phi2 = construct_right_resolver(g2, &mf2, None)?;
    let phi2 = RightResolver::new(GraphHom::new(
        g2.clone(),
        mf1.graph.clone(),
        phi2.edge_map().to_vec(),
        phi2.state_map().to_vec(),
    )?)?;
    let fp = fiber_product(&phi1, &phi2)?;
    let components = principal_components(&fp.product);
    let mut checked = 0;
    for comp in components.iter() {
        checked += 1;
        let (Ok(to_g1), Ok(to_g2)) = (fp.proj1.restrict_to_states(comp), fp.proj2.restrict_to_states(comp)) else {
            continue;
        };
        if is_synchronizing(&to_g1)? && is_synchronizing(&to_g2)? {
            let witness = SyncExtension { graph: to_g1.domain().clone(), to_g1, to_g2 };
            return Ok(OgIsoDecision {
                isomorphic: true,
                conditional: false,
                minimal_factors_agree: true,
                components_checked: checked,
                witness: Some(witness),
                witness_states: comp.clone(),
            });
        }
    }
    Ok(OgIsoDecision {
        isomorphic: false,
        conditional: false,
        minimal_factors_agree: true,
        components_checked: checked,
        witness: None,
        witness_states: Vec::new(),
    })
}

/// The bunchy decider run on B(G1), B(G2). Only valid under the bunchy
/// factor conjecture, which the result records.
pub fn decide_og_iso_bfc(g1: &Arc<MultiGraph>, g2: &Arc<MultiGraph>) -> Result<OgIsoDecision> {
    for (k, g) in [(1, g1), (2, g2)] {
        if !is_strongly_connected(g) {
            return Err(Error::Precondition(format!("G{k} is not strongly connected")));
        }
    }
    let b1 = max_bunchy_factor(g1)?;
    let b2 = max_bunchy_factor(g2)?;
    let mut d = decide_og_iso_bunchy(&b1.graph, &b2.graph)?;
    d.conditional = true;
    Ok(d)
}
