//! Graph homomorphisms and right-resolvers.
//!
//! A [`GraphHom`] is an edge map with its induced state map, checked for
//! compatibility with sources and targets. A [`RightResolver`] wraps a
//! homomorphism that is surjective and bijective on every out-edge set, and
//! caches the inverse ("lift") table used by every transition computation.

mod io;
mod minimal;
mod parallel;
mod partition;

use std::ops::Deref;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graph::{induced_principal_subgraph, EdgeIx, MultiGraph, StateIx, StateSetFamily};

pub use io::{hom_to_json, hom_to_text, parse_hom, HomJson};
pub use minimal::{
    construct_right_resolver, equitable_quotient, match_by_position, minimal_factor, resolver_to_minimal, EdgeOrders,
    MinimalFactor,
};
pub use parallel::parallel_equivalent;
pub use partition::{is_congruence, quotient, Partition, Quotient};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphHom {
    domain: Arc<MultiGraph>,
    codomain: Arc<MultiGraph>,
    edge_map: Vec<EdgeIx>,
    state_map: Vec<StateIx>,
}

impl GraphHom {
    /// Validates `s∘Φ = ∂Φ∘s` and `t∘Φ = ∂Φ∘t` on every edge.
    pub fn new(
        domain: Arc<MultiGraph>,
        codomain: Arc<MultiGraph>,
        edge_map: Vec<EdgeIx>,
        state_map: Vec<StateIx>,
    ) -> Result<Self> {
        if edge_map.len() != domain.num_edges() || state_map.len() != domain.num_states() {
            return Err(Error::NotHomomorphism("map sizes do not match the domain".into()));
        }
        if let Some(&bad) = state_map.iter().find(|&&s| s >= codomain.num_states()) {
            return Err(Error::NotHomomorphism(format!("state image {bad} out of range")));
        }
        for e in domain.edges() {
            let f = edge_map[e];
            if f >= codomain.num_edges() {
                return Err(Error::NotHomomorphism(format!("edge `{}` has no image", domain.edge_id(e))));
            }
            if codomain.source(f) != state_map[domain.source(e)] || codomain.target(f) != state_map[domain.target(e)] {
                return Err(Error::NotHomomorphism(format!(
                    "edge `{}` -> `{}` does not respect endpoints",
                    domain.edge_id(e),
                    codomain.edge_id(f)
                )));
            }
        }
        Ok(Self { domain, codomain, edge_map, state_map })
    }

    /// Builds a homomorphism from its edge map alone, deriving the state map
    /// from edge endpoints. Every domain state must touch an edge.
    pub fn from_edge_map(domain: Arc<MultiGraph>, codomain: Arc<MultiGraph>, edge_map: Vec<EdgeIx>) -> Result<Self> {
        let mut state_map = vec![usize::MAX; domain.num_states()];
        for (e, &f) in edge_map.iter().enumerate().take(domain.num_edges()) {
            if f >= codomain.num_edges() {
                return Err(Error::NotHomomorphism(format!("edge `{}` has no image", domain.edge_id(e))));
            }
            state_map[domain.source(e)] = codomain.source(f);
            state_map[domain.target(e)] = codomain.target(f);
        }
        if let Some(s) = state_map.iter().position(|&s| s == usize::MAX) {
            return Err(Error::NotHomomorphism(format!("state `{}` has no image", domain.state_id(s))));
        }
        Self::new(domain, codomain, edge_map, state_map)
    }

    pub fn identity(g: Arc<MultiGraph>) -> Self {
        let edge_map = g.edges().collect();
        let state_map = g.states().collect();
        Self { domain: g.clone(), codomain: g, edge_map, state_map }
    }

    pub fn domain(&self) -> &Arc<MultiGraph> {
        &self.domain
    }

    pub fn codomain(&self) -> &Arc<MultiGraph> {
        &self.codomain
    }

    /// Φ on edges.
    pub fn edge_map(&self) -> &[EdgeIx] {
        &self.edge_map
    }

    /// ∂Φ on states.
    pub fn state_map(&self) -> &[StateIx] {
        &self.state_map
    }

    pub fn map_edge(&self, e: EdgeIx) -> EdgeIx {
        self.edge_map[e]
    }

    pub fn map_state(&self, s: StateIx) -> StateIx {
        self.state_map[s]
    }

    /// Restriction to an induced subgraph of the domain that keeps ids.
    pub fn restrict(&self, sub: Arc<MultiGraph>) -> Result<Self> {
        let resolve_state = |s: StateIx| {
            self.domain.state_index(sub.state_id(s)).ok_or_else(|| Error::UnknownState(sub.state_id(s).to_string()))
        };
        let state_map = sub.states().map(|s| Ok(self.state_map[resolve_state(s)?])).collect::<Result<Vec<_>>>()?;
        let edge_map = sub
            .edges()
            .map(|e| {
                let id = sub.edge_id(e);
                let d = self.domain.edge_index(id).ok_or_else(|| Error::UnknownEdge(id.to_string()))?;
                Ok(self.edge_map[d])
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(sub, self.codomain.clone(), edge_map, state_map)
    }
}

/// Result of [`check_right_resolver`]: a verdict and, on failure, the first
/// offending state or edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolverCheck {
    pub ok: bool,
    pub diagnostic: Option<String>,
}

pub fn check_right_resolver(h: &GraphHom) -> ResolverCheck {
    match resolver_violation(h) {
        None => ResolverCheck { ok: true, diagnostic: None },
        Some(d) => ResolverCheck { ok: false, diagnostic: Some(d) },
    }
}

fn resolver_violation(h: &GraphHom) -> Option<String> {
    let (g, k) = (&*h.domain, &*h.codomain);
    for s in g.states() {
        let image = h.state_map[s];
        if g.out_degree(s) != k.out_degree(image) {
            return Some(format!(
                "state `{}` has out-degree {} but its image `{}` has {}",
                g.state_id(s),
                g.out_degree(s),
                k.state_id(image),
                k.out_degree(image)
            ));
        }
        let mut seen = vec![false; k.out_degree(image)];
        for &e in g.out_edges(s) {
            let pos = k.out_position(h.edge_map[e]);
            if std::mem::replace(&mut seen[pos], true) {
                return Some(format!(
                    "state `{}`: two edges map to `{}`",
                    g.state_id(s),
                    k.edge_id(h.edge_map[e])
                ));
            }
        }
    }
    let mut hit = vec![false; k.num_states()];
    for &s in &h.state_map {
        hit[s] = true;
    }
    if let Some(s) = hit.iter().position(|&x| !x) {
        return Some(format!("state `{}` of the codomain is not hit", k.state_id(s)));
    }
    // Edge surjectivity follows from state surjectivity and local bijectivity.
    None
}

/// `outer ∘ inner`.
pub fn compose(outer: &GraphHom, inner: &GraphHom) -> Result<GraphHom> {
    if !Arc::ptr_eq(&inner.codomain, &outer.domain) && *inner.codomain != *outer.domain {
        return Err(Error::Mismatch("inner codomain differs from outer domain".into()));
    }
    let edge_map = inner.edge_map.iter().map(|&e| outer.edge_map[e]).collect();
    let state_map = inner.state_map.iter().map(|&s| outer.state_map[s]).collect();
    Ok(GraphHom {
        domain: inner.domain.clone(),
        codomain: outer.codomain.clone(),
        edge_map,
        state_map,
    })
}

/// A validated right-resolver with a cached lift table.
///
/// `lift[s][k]` is the unique out-edge of `s` mapping to the `k`-th out-edge
/// of `∂Φ(s)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RightResolver {
    hom: GraphHom,
    lift: Vec<Vec<EdgeIx>>,
}

impl RightResolver {
    pub fn new(hom: GraphHom) -> Result<Self> {
        if let Some(d) = resolver_violation(&hom) {
            return Err(Error::NotRightResolving(d));
        }
        let (g, k) = (&*hom.domain, &*hom.codomain);
        let lift = g
            .states()
            .map(|s| {
                let mut row = vec![0; g.out_degree(s)];
                for &e in g.out_edges(s) {
                    row[k.out_position(hom.edge_map[e])] = e;
                }
                row
            })
            .collect();
        Ok(Self { hom, lift })
    }

    pub fn identity(g: Arc<MultiGraph>) -> Self {
        Self::new(GraphHom::identity(g)).expect("identity is right-resolving")
    }

    pub fn hom(&self) -> &GraphHom {
        &self.hom
    }

    pub fn into_hom(self) -> GraphHom {
        self.hom
    }

    /// The out-edge of `s` lying over the codomain edge `a`.
    pub fn lift_edge(&self, s: StateIx, a: EdgeIx) -> Option<EdgeIx> {
        (self.hom.codomain.source(a) == self.hom.state_map[s])
            .then(|| self.lift[s][self.hom.codomain.out_position(a)])
    }

    /// The out-edge of `s` over the `k`-th out-edge of `∂Φ(s)`.
    pub fn lift_at(&self, s: StateIx, k: usize) -> EdgeIx {
        self.lift[s][k]
    }

    /// One-letter transition `s · a`.
    pub fn step(&self, s: StateIx, a: EdgeIx) -> Option<StateIx> {
        self.lift_edge(s, a).map(|e| self.hom.domain.target(e))
    }

    /// `s · u` for a codomain word `u`; the empty word fixes `s`.
    pub fn transition(&self, s: StateIx, word: &[EdgeIx]) -> Result<StateIx> {
        let k = &*self.hom.codomain;
        word.iter().try_fold(s, |cur, &a| {
            self.step(cur, a).ok_or_else(|| {
                Error::InvalidWord(format!(
                    "`{}` does not start at `{}`",
                    k.edge_id(a),
                    k.state_id(self.hom.state_map[cur])
                ))
            })
        })
    }

    /// The fiber `(∂Φ)⁻¹(i)`, sorted.
    pub fn fiber(&self, i: StateIx) -> Vec<StateIx> {
        self.hom.domain.states().filter(|&s| self.hom.state_map[s] == i).collect()
    }

    /// All fibers, indexed by codomain state.
    pub fn fibers(&self) -> StateSetFamily {
        let mut sets = vec![Vec::new(); self.hom.codomain.num_states()];
        for s in self.hom.domain.states() {
            sets[self.hom.state_map[s]].push(s);
        }
        StateSetFamily { sets }
    }

    /// `self ∘ inner`, which is right-resolving again.
    pub fn compose(&self, inner: &RightResolver) -> Result<RightResolver> {
        RightResolver::new(compose(&self.hom, &inner.hom)?)
    }

    /// Restriction to a follower-closed state set. The result is a
    /// right-resolver only if the restricted state map is still onto.
    pub fn restrict_to_states(&self, states: &[StateIx]) -> Result<RightResolver> {
        let sub = Arc::new(induced_principal_subgraph(&self.hom.domain, states)?);
        RightResolver::new(self.hom.restrict(sub)?)
    }
}

impl Deref for RightResolver {
    type Target = GraphHom;

    fn deref(&self) -> &GraphHom {
        &self.hom
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arc(g: MultiGraph) -> Arc<MultiGraph> {
        Arc::new(g)
    }

    fn m(d: usize) -> Arc<MultiGraph> {
        arc(MultiGraph::from_counts(&[vec![d]]).unwrap())
    }

    #[test]
    fn identity_is_right_resolving() {
        let h = GraphHom::identity(m(2));
        assert!(check_right_resolver(&h).ok);
    }

    #[test]
    fn two_cycle_onto_single_loop() {
        let c2 = arc(MultiGraph::from_counts(&[vec![0, 1], vec![1, 0]]).unwrap());
        let h = GraphHom::from_edge_map(c2, m(1), vec![0, 0]).unwrap();
        assert!(check_right_resolver(&h).ok);
    }

    #[test]
    fn collapsing_loops_is_not_right_resolving() {
        let h = GraphHom::new(m(2), m(1), vec![0, 0], vec![0]).unwrap();
        let check = check_right_resolver(&h);
        assert!(!check.ok);
        assert!(check.diagnostic.unwrap().contains("out-degree"));
        let m22 = m(2);
        let h = GraphHom::new(m22.clone(), m22, vec![1, 1], vec![0]).unwrap();
        assert!(check_right_resolver(&h).diagnostic.unwrap().contains("two edges"));
    }

    #[test]
    fn endpoint_mismatch_is_rejected() {
        let c2 = arc(MultiGraph::from_counts(&[vec![0, 1], vec![1, 0]]).unwrap());
        let err = GraphHom::new(c2.clone(), c2, vec![1, 0], vec![0, 1]).unwrap_err();
        assert!(matches!(err, Error::NotHomomorphism(_)));
    }

    #[test]
    fn compose_with_identity() {
        let c2 = arc(MultiGraph::from_counts(&[vec![0, 1], vec![1, 0]]).unwrap());
        let phi = GraphHom::from_edge_map(c2, m(1), vec![0, 0]).unwrap();
        let id = GraphHom::identity(phi.codomain().clone());
        assert_eq!(compose(&id, &phi).unwrap(), phi);
        assert!(compose(&phi, &phi).is_err());
    }

    #[test]
    fn transitions_follow_lifts() {
        // Two states, e1: 1->1, e2: 1->2, e3: 2->1, e4: 2->2 over two loops a, b.
        let g = arc(MultiGraph::from_ids(
            &["1", "2"],
            &[("e1", "1", "1"), ("e2", "1", "2"), ("e3", "2", "1"), ("e4", "2", "2")],
        )
        .unwrap());
        let m2 = arc(MultiGraph::from_ids(&["m"], &[("a", "m", "m"), ("b", "m", "m")]).unwrap());
        let phi = RightResolver::new(GraphHom::from_edge_map(g, m2, vec![0, 1, 0, 1]).unwrap()).unwrap();
        assert_eq!(phi.transition(0, &[]).unwrap(), 0);
        assert_eq!(phi.transition(0, &[1]).unwrap(), 1);
        assert_eq!(phi.transition(1, &[1]).unwrap(), 1);
        assert_eq!(phi.transition(1, &[0, 0]).unwrap(), 0);
        assert_eq!(phi.fibers().sets, vec![vec![0, 1]]);
    }
}
