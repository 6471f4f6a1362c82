use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use crate::bunchy::as_cycle_of_bunches;
use crate::error::{Error, Result};
use crate::graph::{EdgeIx, MultiGraph, StateIx};
use crate::hom::{GraphHom, RightResolver};

/// A labelling of each `E_I(G)` by `0..|E_I(G)|`, read as a right-resolver
/// onto a cycle of bunches: label `k` at `I` maps to the `k`-th out-edge of
/// the image state.
#[derive(Debug, Clone)]
pub struct TotalOrderColouring {
    labels: Vec<usize>,
    resolver: RightResolver,
}

impl TotalOrderColouring {
    /// `state_map` must be a state map onto `m`, which must be a cycle of
    /// bunches.
    pub fn new(g: &Arc<MultiGraph>, m: &Arc<MultiGraph>, state_map: &[StateIx], labels: Vec<usize>) -> Result<Self> {
        if as_cycle_of_bunches(m).is_none() {
            return Err(Error::Precondition("colouring target is not a cycle of bunches".into()));
        }
        if labels.len() != g.num_edges() {
            return Err(Error::InvalidOrder(format!("{} labels for {} edges", labels.len(), g.num_edges())));
        }
        for s in g.states() {
            let mut seen: Vec<usize> = g.out_edges(s).iter().map(|&e| labels[e]).collect();
            seen.sort_unstable();
            if seen.iter().enumerate().any(|(k, &l)| k != l) {
                return Err(Error::InvalidOrder(format!("labels at `{}` are not 0..{}", g.state_id(s), seen.len())));
            }
        }
        let edge_map = g
            .edges()
            .map(|e| {
                let out = m.out_edges(state_map[g.source(e)]);
                out.get(labels[e]).copied().ok_or_else(|| {
                    Error::Mismatch(format!("`{}` has more out-edges than its image", g.state_id(g.source(e))))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let resolver = RightResolver::new(GraphHom::new(g.clone(), m.clone(), edge_map, state_map.to_vec())?)?;
        Ok(Self { labels, resolver })
    }

    /// The colouring induced by a resolver onto a cycle of bunches.
    pub fn from_resolver(phi: &RightResolver) -> Result<Self> {
        if as_cycle_of_bunches(phi.codomain()).is_none() {
            return Err(Error::Precondition("resolver target is not a cycle of bunches".into()));
        }
        let labels = phi.domain().edges().map(|e| phi.codomain().out_position(phi.map_edge(e))).collect();
        Ok(Self { labels, resolver: phi.clone() })
    }

    /// Label 0 on `zero[s]`, the rest of `E_s` in declaration order.
    pub fn from_zero_edges(
        g: &Arc<MultiGraph>,
        m: &Arc<MultiGraph>,
        state_map: &[StateIx],
        zero: &[EdgeIx],
    ) -> Result<Self> {
        let mut labels = vec![0; g.num_edges()];
        for s in g.states() {
            if g.source(zero[s]) != s {
                return Err(Error::InvalidOrder(format!("0-edge of `{}` starts elsewhere", g.state_id(s))));
            }
            let mut next = 1;
            for &e in g.out_edges(s) {
                if e != zero[s] {
                    labels[e] = next;
                    next += 1;
                }
            }
        }
        Self::new(g, m, state_map, labels)
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn resolver(&self) -> &RightResolver {
        &self.resolver
    }

    /// The edge labelled 0 at each state.
    pub fn zero_edges(&self) -> Vec<EdgeIx> {
        let g = self.resolver.domain();
        g.states()
            .map(|s| *g.out_edges(s).iter().find(|&&e| self.labels[e] == 0).expect("label 0 present"))
            .collect()
    }
}

/// Trees of the 0-labelled subgraph `W` viewed as a cyclic system of maps
/// between the fibers `V_0, …, V_{p-1}` over the cycle `M`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TreeAnalysis {
    /// `W`: the 0-edge at each state.
    pub zero_edges: Vec<EdgeIx>,
    /// M's states in cycle order; position `k` is `cycle[k]`.
    pub cycle: Vec<StateIx>,
    /// Position of each state's fiber.
    pub position: Vec<usize>,
    /// Steps until the orbit becomes periodic.
    pub height: Vec<usize>,
    pub root: Vec<StateIx>,
    /// Length of the cycle of `W` through the root, divided by `p`.
    pub period_multiple: Vec<usize>,
    pub h_max: Vec<usize>,
    /// `h_k(J)` for every root `J` of a state in `V_k`.
    pub tallest: Vec<BTreeMap<StateIx, usize>>,
    pub z: Vec<usize>,
    pub unique_tallest_tree_at: Option<usize>,
}

impl TreeAnalysis {
    pub fn has_unique_tallest_tree(&self) -> bool {
        self.unique_tallest_tree_at.is_some()
    }

    /// Fewest roots tied for the tallest tree at any position. One means a
    /// unique tallest tree; hill climbing minimizes this.
    pub fn tie_score(&self) -> usize {
        (0..self.cycle.len())
            .map(|k| self.tallest[k].values().filter(|&&h| h == self.h_max[k]).count())
            .min()
            .unwrap_or(usize::MAX)
    }
}

pub fn tree_analysis(c: &TotalOrderColouring) -> Result<TreeAnalysis> {
    let phi = c.resolver();
    let (g, m) = (phi.domain(), phi.codomain());
    if as_cycle_of_bunches(m).is_none() {
        return Err(Error::Precondition("minimal factor is not a cycle of bunches".into()));
    }
    let p = m.num_states();
    let mut cycle = vec![0];
    while cycle.len() < p {
        cycle.push(m.followers(*cycle.last().expect("nonempty"))[0]);
    }
    let mut pos_of = vec![0; p];
    for (k, &i) in cycle.iter().enumerate() {
        pos_of[i] = k;
    }
    let zero_edges = c.zero_edges();
    let next: Vec<StateIx> = zero_edges.iter().map(|&e| g.target(e)).collect();
    let n = g.num_states();

    // Functional graph: mark cycle states and their cycle lengths first.
    let mut cycle_len = vec![0usize; n];
    let mut colour = vec![0u8; n];
    for start in 0..n {
        let mut path = Vec::new();
        let mut s = start;
        while colour[s] == 0 {
            colour[s] = 1;
            path.push(s);
            s = next[s];
        }
        if colour[s] == 1 {
            let at = path.iter().position(|&x| x == s).expect("on path");
            let len = path.len() - at;
            for &x in &path[at..] {
                cycle_len[x] = len;
            }
        }
        for &x in &path {
            colour[x] = 2;
        }
    }
    let mut height = vec![usize::MAX; n];
    let mut root = vec![usize::MAX; n];
    for s in 0..n {
        if cycle_len[s] > 0 {
            height[s] = 0;
            root[s] = s;
        }
    }
    for start in 0..n {
        let mut path = Vec::new();
        let mut s = start;
        while height[s] == usize::MAX {
            path.push(s);
            s = next[s];
        }
        for &x in path.iter().rev() {
            height[x] = height[s] + 1;
            root[x] = root[s];
            s = x;
        }
    }
    let period_multiple: Vec<usize> = (0..n).map(|s| cycle_len[root[s]] / p).collect();
    let position: Vec<usize> = (0..n).map(|s| pos_of[phi.map_state(s)]).collect();

    let mut h_max = vec![0; p];
    let mut tallest = vec![BTreeMap::new(); p];
    let mut z = vec![1; p];
    for s in 0..n {
        let k = position[s];
        h_max[k] = h_max[k].max(height[s]);
        let h = tallest[k].entry(root[s]).or_insert(0);
        *h = (*h).max(height[s]);
        z[k] = lcm(z[k], period_multiple[s]);
    }
    let unique_tallest_tree_at =
        (0..p).find(|&k| tallest[k].values().filter(|&&h| h == h_max[k]).count() == 1);
    Ok(TreeAnalysis {
        zero_edges,
        cycle,
        position,
        height,
        root,
        period_multiple,
        h_max,
        tallest,
        z,
        unique_tallest_tree_at,
    })
}

fn lcm(a: usize, b: usize) -> usize {
    let (mut x, mut y) = (a, b);
    while y != 0 {
        (x, y) = (y, x % y);
    }
    a / x * b
}
