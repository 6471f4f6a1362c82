use std::collections::{BTreeMap, VecDeque};
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use super::partition::block_state_ids;
use super::{GraphHom, Partition, RightResolver};
use crate::error::{Error, Result};
use crate::graph::{EdgeIx, MultiGraph, StateIx};

/// M(G) together with Σ_G.
///
/// States of `graph` are named `m0, m1, ...` in canonical order: the order
/// depends only on the isomorphism class of G, so any isomorphism between
/// two minimal factors built here preserves state indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinimalFactor {
    pub graph: Arc<MultiGraph>,
    pub sigma: Vec<StateIx>,
    pub canonical_order: Vec<StateIx>,
}

impl MinimalFactor {
    pub fn fiber(&self, i: StateIx) -> Vec<StateIx> {
        (0..self.sigma.len()).filter(|&s| self.sigma[s] == i).collect()
    }
}

/// Coarsest out-equitable partition of V(G), by refinement from the single
/// block. Labels are ranks of `(old label, sorted (target label, count))`
/// keys, so they are invariant under isomorphism.
pub(crate) fn coarsest_equitable_labels(g: &MultiGraph) -> Vec<usize> {
    let n = g.num_states();
    let mut labels = vec![0; n];
    let mut count = usize::from(n > 0);
    loop {
        let keys: Vec<_> = g.states().map(|s| (labels[s], signature(g, &labels, s))).collect();
        let ranks: BTreeMap<_, usize> = keys.iter().map(|k| (k, 0)).collect();
        let ranks: BTreeMap<_, usize> = ranks.into_keys().enumerate().map(|(i, k)| (k, i)).collect();
        let next: Vec<usize> = keys.iter().map(|k| ranks[k]).collect();
        let done = ranks.len() == count;
        count = ranks.len();
        labels = next;
        if done {
            return labels;
        }
    }
}

fn signature(g: &MultiGraph, labels: &[usize], s: StateIx) -> Vec<(usize, usize)> {
    let mut counts = BTreeMap::new();
    for &e in g.out_edges(s) {
        *counts.entry(labels[g.target(e)]).or_insert(0) += 1;
    }
    counts.into_iter().collect()
}

pub fn minimal_factor(g: &MultiGraph) -> Result<MinimalFactor> {
    g.require_sink_free()?;
    let sigma = coarsest_equitable_labels(g);
    let k = sigma.iter().max().map_or(0, |&m| m + 1);
    let mut rep = vec![usize::MAX; k];
    for s in g.states().rev() {
        rep[sigma[s]] = s;
    }
    let states = (0..k).map(|i| format!("m{i}")).collect();
    let mut edges = Vec::new();
    for (i, &r) in rep.iter().enumerate() {
        for (j, c) in signature(g, &sigma, r) {
            for n in 0..c {
                edges.push((format!("m{i}-m{j}.{n}"), i, j));
            }
        }
    }
    let graph = Arc::new(MultiGraph::new(states, edges)?);
    Ok(MinimalFactor { graph, sigma, canonical_order: (0..k).collect() })
}

/// Per-state total orders on out-edge sets, used by positional matching. `None`
/// means declaration order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EdgeOrders {
    pub domain: Option<Vec<Vec<EdgeIx>>>,
    pub codomain: Option<Vec<Vec<EdgeIx>>>,
}

impl EdgeOrders {
    pub fn shuffled<R: Rng>(domain: &MultiGraph, codomain: &MultiGraph, rng: &mut R) -> Self {
        let shuffle = |g: &MultiGraph, rng: &mut R| {
            g.states()
                .map(|s| {
                    let mut v = g.out_edges(s).to_vec();
                    v.shuffle(rng);
                    v
                })
                .collect()
        };
        let d = shuffle(domain, rng);
        let c = shuffle(codomain, rng);
        Self { domain: Some(d), codomain: Some(c) }
    }
}

fn checked_order<'a>(g: &'a MultiGraph, order: Option<&'a Vec<Vec<EdgeIx>>>, s: StateIx) -> Result<&'a [EdgeIx]> {
    let Some(order) = order else { return Ok(g.out_edges(s)) };
    if order.len() != g.num_states() {
        return Err(Error::InvalidOrder(format!("expected {} per-state orders, got {}", g.num_states(), order.len())));
    }
    let row = &order[s];
    let mut sorted = row.clone();
    sorted.sort_unstable();
    if sorted != g.out_edges(s) {
        return Err(Error::InvalidOrder(format!("order at `{}` is not a permutation of its out-edges", g.state_id(s))));
    }
    Ok(row)
}

/// Positional matching for any state map `sigma: V(G) → V(H)`.
///
/// For each state `I'` and each codomain state `J`, the edges of `I'` whose
/// target lies over `J` are matched in order with the edges of
/// `E_{σ(I'),J}(H)`. Fails if the counts differ anywhere.
pub fn match_by_position(
    g: &MultiGraph,
    h: &MultiGraph,
    sigma: &[StateIx],
    orders: &EdgeOrders,
) -> Result<Vec<EdgeIx>> {
    let mut edge_map = vec![usize::MAX; g.num_edges()];
    for s in g.states() {
        let i = sigma[s];
        let mut slots: BTreeMap<StateIx, VecDeque<EdgeIx>> = BTreeMap::new();
        for &a in checked_order(h, orders.codomain.as_ref(), i)? {
            slots.entry(h.target(a)).or_default().push_back(a);
        }
        for &e in checked_order(g, orders.domain.as_ref(), s)? {
            let j = sigma[g.target(e)];
            let a = slots.get_mut(&j).and_then(|q| q.pop_front()).ok_or_else(|| {
                Error::Mismatch(format!("`{}` has more edges over `{}` than its image", g.state_id(s), h.state_id(j)))
            })?;
            edge_map[e] = a;
        }
        if let Some((&j, _)) = slots.iter().find(|(_, q)| !q.is_empty()) {
            return Err(Error::Mismatch(format!(
                "`{}` has fewer edges over `{}` than its image",
                g.state_id(s),
                h.state_id(j)
            )));
        }
    }
    Ok(edge_map)
}

/// A right-resolver G → M(G) with `∂Φ = Σ_G`.
pub fn construct_right_resolver(
    g: &Arc<MultiGraph>,
    target: &MinimalFactor,
    orders: Option<&EdgeOrders>,
) -> Result<RightResolver> {
    let default = EdgeOrders::default();
    let edge_map = match_by_position(g, &target.graph, &target.sigma, orders.unwrap_or(&default))?;
    RightResolver::new(GraphHom::new(g.clone(), target.graph.clone(), edge_map, target.sigma.clone())?)
}

/// M(G) and the default positional-matching resolver onto it.
pub fn resolver_to_minimal(g: &Arc<MultiGraph>) -> Result<(MinimalFactor, RightResolver)> {
    let mf = minimal_factor(g)?;
    let phi = construct_right_resolver(g, &mf, None)?;
    Ok((mf, phi))
}

/// The right-resolving factor G → G/π for an out-equitable partition π.
///
/// Quotient states and edges are named as in [`super::quotient`]; the
/// representative of each block keeps its edge ids.
pub fn equitable_quotient(g: &Arc<MultiGraph>, p: &Partition) -> Result<RightResolver> {
    if p.num_states() != g.num_states() {
        return Err(Error::InvalidPartition("partition size differs from graph".into()));
    }
    let labels = p.labels();
    let mut edges = Vec::new();
    for block in p.blocks() {
        let rep = block[0];
        let sig = signature(g, labels, rep);
        if let Some(&other) = block.iter().find(|&&s| signature(g, labels, s) != sig) {
            return Err(Error::InvalidPartition(format!(
                "`{}` and `{}` have different edge counts into blocks",
                g.state_id(rep),
                g.state_id(other)
            )));
        }
        for &e in g.out_edges(rep) {
            edges.push((g.edge_id(e).to_string(), labels[rep], labels[g.target(e)]));
        }
    }
    let h = Arc::new(MultiGraph::new(block_state_ids(g, p), edges)?);
    let edge_map = match_by_position(g, &h, labels, &EdgeOrders::default())?;
    RightResolver::new(GraphHom::new(g.clone(), h, edge_map, labels.to_vec())?)
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::graph::graph_isomorphic;

    fn counts(c: &[Vec<usize>]) -> Arc<MultiGraph> {
        Arc::new(MultiGraph::from_counts(c).unwrap())
    }

    #[test]
    fn minimal_of_loops_is_itself() {
        let g = counts(&[vec![3]]);
        let mf = minimal_factor(&g).unwrap();
        assert_eq!(mf.sigma, vec![0]);
        assert_eq!(mf.graph.num_edges(), 3);
    }

    #[test]
    fn minimal_of_cycle_is_one_loop() {
        let g = counts(&[vec![0, 1, 0], vec![0, 0, 1], vec![1, 0, 0]]);
        let mf = minimal_factor(&g).unwrap();
        assert_eq!(mf.sigma, vec![0, 0, 0]);
        assert_eq!((mf.graph.num_states(), mf.graph.num_edges()), (1, 1));
    }

    #[test]
    fn minimal_cycle_of_bunches_is_fixed() {
        let g = counts(&[vec![0, 2], vec![3, 0]]);
        let mf = minimal_factor(&g).unwrap();
        assert_eq!(mf.graph.num_states(), 2);
        assert!(graph_isomorphic(&g, &mf.graph).unwrap().is_some());
        let o22 = counts(&[vec![0, 2], vec![2, 0]]);
        let mf = minimal_factor(&o22).unwrap();
        assert_eq!((mf.graph.num_states(), mf.graph.num_edges()), (1, 2));
    }

    #[test]
    fn minimal_factor_is_idempotent() {
        let g = counts(&[vec![1, 1, 0], vec![0, 0, 2], vec![1, 1, 0]]);
        let mf = minimal_factor(&g).unwrap();
        let again = minimal_factor(&mf.graph).unwrap();
        assert_eq!(again.sigma, (0..mf.graph.num_states()).collect::<Vec<_>>());
        assert_eq!(again.graph, mf.graph);
    }

    #[test]
    fn positional_matching_on_two_cycle_and_o22() {
        let c2 = counts(&[vec![0, 1], vec![1, 0]]);
        let mf = minimal_factor(&c2).unwrap();
        let phi = construct_right_resolver(&c2, &mf, None).unwrap();
        assert_eq!(phi.edge_map(), &[0, 0]);
        let o22 = counts(&[vec![0, 2], vec![2, 0]]);
        let mf = minimal_factor(&o22).unwrap();
        let phi = construct_right_resolver(&o22, &mf, None).unwrap();
        assert_eq!(phi.edge_map(), &[0, 1, 0, 1]);
    }

    #[test]
    fn shuffled_orders_keep_state_map() {
        let g = counts(&[vec![1, 1, 1], vec![0, 2, 1], vec![2, 0, 1]]);
        let mf = minimal_factor(&g).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let orders = EdgeOrders::shuffled(&g, &mf.graph, &mut rng);
            let phi = construct_right_resolver(&g, &mf, Some(&orders)).unwrap();
            assert_eq!(phi.state_map(), mf.sigma.as_slice());
        }
    }

    #[test]
    fn malformed_order_is_rejected() {
        let g = counts(&[vec![2]]);
        let mf = minimal_factor(&g).unwrap();
        let orders = EdgeOrders { domain: Some(vec![vec![0, 0]]), codomain: None };
        assert!(matches!(construct_right_resolver(&g, &mf, Some(&orders)), Err(Error::InvalidOrder(_))));
    }

    #[test]
    fn equitable_quotient_checks_partition() {
        let g = counts(&[vec![0, 1], vec![1, 0]]);
        let total = Partition::from_labels(&[0, 0]);
        let phi = equitable_quotient(&g, &total).unwrap();
        assert_eq!(phi.codomain().num_states(), 1);
        let bad = counts(&[vec![1, 1], vec![1, 0]]);
        let err = equitable_quotient(&bad, &Partition::from_labels(&[0, 0])).unwrap_err();
        assert!(matches!(err, Error::InvalidPartition(_)));
    }
}
