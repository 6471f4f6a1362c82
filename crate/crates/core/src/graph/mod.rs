//! Finite directed multigraphs.
//!
//! A [`MultiGraph`] stores states and edges under external string ids and
//! dense internal indices. Loops and parallel edges are allowed. Graphs are
//! immutable once built; every construction in this crate returns a new
//! graph.

mod io;
mod iso;
mod structure;

pub(crate) use structure::tarjan_postorder;

use std::collections::HashMap;

use crate::error::{Error, Result};

pub use io::{load_graph, parse_graph, to_dot, to_json, to_text, GraphJson};
pub use iso::{graph_isomorphic, graph_isomorphic_with, Isomorphism, DEFAULT_ISO_LIMIT};
pub use structure::{
    condensation, higher_edge_graph, induced_principal_subgraph, is_strongly_connected, period,
    principal_components, strong_components,
};

/// Index of a state inside one graph.
pub type StateIx = usize;
/// Index of an edge inside one graph.
pub type EdgeIx = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiGraph {
    state_ids: Vec<String>,
    edge_ids: Vec<String>,
    source: Vec<StateIx>,
    target: Vec<StateIx>,
    out_edges: Vec<Vec<EdgeIx>>,
    out_pos: Vec<usize>,
    state_lookup: HashMap<String, StateIx>,
    edge_lookup: HashMap<String, EdgeIx>,
}

impl MultiGraph {
    /// Builds a graph from ids and `(edge id, source, target)` triples.
    ///
    /// Sinks are allowed here; call [`MultiGraph::require_sink_free`] where
    /// an operation needs it.
    pub fn new(state_ids: Vec<String>, edges: Vec<(String, StateIx, StateIx)>) -> Result<Self> {
        let mut state_lookup = HashMap::with_capacity(state_ids.len());
        for (i, id) in state_ids.iter().enumerate() {
            if state_lookup.insert(id.clone(), i).is_some() {
                return Err(Error::DuplicateId { kind: "state", id: id.clone() });
            }
        }
        let n = state_ids.len();
        let mut edge_ids = Vec::with_capacity(edges.len());
        let mut source = Vec::with_capacity(edges.len());
        let mut target = Vec::with_capacity(edges.len());
        let mut out_edges = vec![Vec::new(); n];
        let mut out_pos = Vec::with_capacity(edges.len());
        let mut edge_lookup = HashMap::with_capacity(edges.len());
        for (e, (id, s, t)) in edges.into_iter().enumerate() {
            if s >= n || t >= n {
                return Err(Error::UnknownState(format!("index {} in edge `{id}`", s.max(t))));
            }
            if edge_lookup.insert(id.clone(), e).is_some() {
                return Err(Error::DuplicateId { kind: "edge", id });
            }
            edge_ids.push(id);
            source.push(s);
            target.push(t);
            out_pos.push(out_edges[s].len());
            out_edges[s].push(e);
        }
        Ok(Self { state_ids, edge_ids, source, target, out_edges, out_pos, state_lookup, edge_lookup })
    }

    /// Convenience constructor resolving edge endpoints by state id.
    pub fn from_ids(states: &[&str], edges: &[(&str, &str, &str)]) -> Result<Self> {
        let state_ids: Vec<String> = states.iter().map(|s| s.to_string()).collect();
        let lookup: HashMap<&str, usize> = states.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        let resolve = |id: &str| lookup.get(id).copied().ok_or_else(|| Error::UnknownState(id.to_string()));
        let edges = edges
            .iter()
            .map(|(e, s, t)| Ok((e.to_string(), resolve(s)?, resolve(t)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(state_ids, edges)
    }

    /// Builds a graph from an edge-count matrix, naming states `0..n` and
    /// edges `e0, e1, ...` in row-major order.
    pub fn from_counts(counts: &[Vec<usize>]) -> Result<Self> {
        let n = counts.len();
        let states = (0..n).map(|i| i.to_string()).collect();
        let mut edges = Vec::new();
        for (i, row) in counts.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Precondition(format!("row {i} of count matrix has length {}", row.len())));
            }
            for (j, &c) in row.iter().enumerate() {
                for _ in 0..c {
                    edges.push((format!("e{}", edges.len()), i, j));
                }
            }
        }
        Self::new(states, edges)
    }

    pub fn num_states(&self) -> usize {
        self.state_ids.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edge_ids.len()
    }

    pub fn states(&self) -> std::ops::Range<StateIx> {
        0..self.num_states()
    }

    pub fn edges(&self) -> std::ops::Range<EdgeIx> {
        0..self.num_edges()
    }

    pub fn state_id(&self, s: StateIx) -> &str {
        &self.state_ids[s]
    }

    pub fn edge_id(&self, e: EdgeIx) -> &str {
        &self.edge_ids[e]
    }

    pub fn state_ids(&self) -> &[String] {
        &self.state_ids
    }

    pub fn edge_ids(&self) -> &[String] {
        &self.edge_ids
    }

    pub fn state_index(&self, id: &str) -> Option<StateIx> {
        self.state_lookup.get(id).copied()
    }

    pub fn edge_index(&self, id: &str) -> Option<EdgeIx> {
        self.edge_lookup.get(id).copied()
    }

    pub fn source(&self, e: EdgeIx) -> StateIx {
        self.source[e]
    }

    pub fn target(&self, e: EdgeIx) -> StateIx {
        self.target[e]
    }

    /// Outgoing edges of `s` in declaration order (E_I).
    pub fn out_edges(&self, s: StateIx) -> &[EdgeIx] {
        &self.out_edges[s]
    }

    /// Position of `e` inside `out_edges(source(e))`.
    pub fn out_position(&self, e: EdgeIx) -> usize {
        self.out_pos[e]
    }

    pub fn out_degree(&self, s: StateIx) -> usize {
        self.out_edges[s].len()
    }

    /// Follower states F(I), sorted and deduplicated.
    pub fn followers(&self, s: StateIx) -> Vec<StateIx> {
        let mut f: Vec<StateIx> = self.out_edges[s].iter().map(|&e| self.target[e]).collect();
        f.sort_unstable();
        f.dedup();
        f
    }

    /// |E_IJ|.
    pub fn edge_count(&self, from: StateIx, to: StateIx) -> usize {
        self.out_edges[from].iter().filter(|&&e| self.target[e] == to).count()
    }

    /// Dense edge-count matrix.
    pub fn count_matrix(&self) -> Vec<Vec<usize>> {
        let n = self.num_states();
        let mut m = vec![vec![0; n]; n];
        for e in self.edges() {
            m[self.source[e]][self.target[e]] += 1;
        }
        m
    }

    pub fn in_degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.num_states()];
        for &t in &self.target {
            d[t] += 1;
        }
        d
    }

    pub fn sinks(&self) -> Vec<StateIx> {
        self.states().filter(|&s| self.out_edges[s].is_empty()).collect()
    }

    pub fn require_sink_free(&self) -> Result<()> {
        match self.sinks().first() {
            Some(&s) => Err(Error::Sink(self.state_ids[s].clone())),
            None => Ok(()),
        }
    }

    /// Out-degree D if every state has the same out-degree.
    pub fn constant_out_degree(&self) -> Option<usize> {
        let d = self.out_edges.first()?.len();
        self.states().all(|s| self.out_degree(s) == d).then_some(d)
    }

    pub(crate) fn successor_lists(&self) -> Vec<Vec<StateIx>> {
        self.states().map(|s| self.followers(s)).collect()
    }
}

/// A family of pairwise disjoint state subsets of one graph.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct StateSetFamily {
    pub sets: Vec<Vec<StateIx>>,
}

impl StateSetFamily {
    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Vec<StateIx>> {
        self.sets.iter()
    }

    /// Index of the set containing each state (`None` for uncovered states).
    pub fn membership(&self, num_states: usize) -> Vec<Option<usize>> {
        let mut m = vec![None; num_states];
        for (i, set) in self.sets.iter().enumerate() {
            for &s in set {
                m[s] = Some(i);
            }
        }
        m
    }

    pub fn to_ids(&self, g: &MultiGraph) -> Vec<Vec<String>> {
        self.sets.iter().map(|set| set.iter().map(|&s| g.state_id(s).to_string()).collect()).collect()
    }
}
