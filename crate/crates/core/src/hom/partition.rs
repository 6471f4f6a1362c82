use std::sync::Arc;

use super::{GraphHom, RightResolver};
use crate::error::{Error, Result};
use crate::graph::{MultiGraph, StateIx};

/// An equivalence relation on the states of one graph.
///
/// Blocks are numbered by first appearance and each block is sorted, so two
/// partitions are equal as values iff they are the same relation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    labels: Vec<usize>,
    blocks: Vec<Vec<StateIx>>,
}

impl Partition {
    /// Any labelling works; equal labels mean the same block.
    pub fn from_labels<T: Eq + std::hash::Hash + Copy>(labels: &[T]) -> Self {
        let mut seen = std::collections::HashMap::new();
        let mut blocks: Vec<Vec<StateIx>> = Vec::new();
        let labels = labels
            .iter()
            .enumerate()
            .map(|(s, l)| {
                let b = *seen.entry(*l).or_insert_with(|| {
                    blocks.push(Vec::new());
                    blocks.len() - 1
                });
                blocks[b].push(s);
                b
            })
            .collect();
        Self { labels, blocks }
    }

    pub fn new(num_states: usize, blocks: Vec<Vec<StateIx>>) -> Result<Self> {
        let mut labels = vec![usize::MAX; num_states];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            for &s in block {
                if s >= num_states {
                    return Err(Error::InvalidPartition(format!("state index {s} out of range")));
                }
                if labels[s] != usize::MAX {
                    return Err(Error::InvalidPartition(format!("state index {s} is in two blocks")));
                }
                labels[s] = b;
            }
        }
        if let Some(s) = labels.iter().position(|&l| l == usize::MAX) {
            return Err(Error::InvalidPartition(format!("state index {s} is not covered")));
        }
        Ok(Self::from_labels(&labels))
    }

    pub fn diagonal(num_states: usize) -> Self {
        Self { labels: (0..num_states).collect(), blocks: (0..num_states).map(|s| vec![s]).collect() }
    }

    /// The partition into ∂Φ-fibers.
    pub fn from_fibers(phi: &GraphHom) -> Self {
        Self::from_labels(phi.state_map())
    }

    pub fn num_states(&self) -> usize {
        self.labels.len()
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn blocks(&self) -> &[Vec<StateIx>] {
        &self.blocks
    }

    pub fn block_of(&self, s: StateIx) -> usize {
        self.labels[s]
    }

    pub fn same_block(&self, a: StateIx, b: StateIx) -> bool {
        self.labels[a] == self.labels[b]
    }

    pub fn is_diagonal(&self) -> bool {
        self.blocks.len() == self.labels.len()
    }

    /// Every block of `self` lies inside a block of `coarser`.
    pub fn refines(&self, coarser: &Partition) -> bool {
        self.blocks.iter().all(|b| b.iter().all(|&s| coarser.same_block(s, b[0])))
    }

    pub fn to_ids(&self, g: &MultiGraph) -> Vec<Vec<String>> {
        self.blocks.iter().map(|b| b.iter().map(|&s| g.state_id(s).to_string()).collect()).collect()
    }
}

/// Names quotient states: a singleton keeps its member's id, larger blocks
/// join member ids with `+`.
pub(crate) fn block_state_ids(g: &MultiGraph, p: &Partition) -> Vec<String> {
    p.blocks()
        .iter()
        .map(|b| b.iter().map(|&s| g.state_id(s)).collect::<Vec<_>>().join("+"))
        .collect()
}

fn congruence_violation(p: &Partition, phi: &RightResolver) -> Option<String> {
    let g = phi.domain();
    let h = phi.codomain();
    if p.num_states() != g.num_states() {
        return Some("partition size differs from graph".into());
    }
    for block in p.blocks() {
        let rep = block[0];
        let image = phi.map_state(rep);
        if let Some(&s) = block.iter().find(|&&s| phi.map_state(s) != image) {
            return Some(format!("`{}` and `{}` lie in different fibers", g.state_id(rep), g.state_id(s)));
        }
        for &a in h.out_edges(image) {
            let to = p.block_of(phi.step(rep, a).expect("same fiber"));
            if let Some(&s) = block.iter().find(|&&s| p.block_of(phi.step(s, a).expect("same fiber")) != to) {
                return Some(format!(
                    "`{}` and `{}` separate under `{}`",
                    g.state_id(rep),
                    g.state_id(s),
                    h.edge_id(a)
                ));
            }
        }
    }
    None
}

/// Blocks lie in fibers and are closed under one-letter transitions, which
/// gives closure under all words by induction.
pub fn is_congruence(p: &Partition, phi: &RightResolver) -> bool {
    congruence_violation(p, phi).is_none()
}

/// G/∼ with the factorization `Φ = induced ∘ quotient_map`.
#[derive(Debug, Clone)]
pub struct Quotient {
    pub graph: Arc<MultiGraph>,
    pub quotient_map: RightResolver,
    pub induced: RightResolver,
}

/// Quotient by a congruence. The edges of a block are those of its first
/// member, keeping their ids, so the diagonal quotient reproduces G.
pub fn quotient(p: &Partition, phi: &RightResolver) -> Result<Quotient> {
    if let Some(d) = congruence_violation(p, phi) {
        return Err(Error::NotCongruence(d));
    }
    let g = phi.domain();
    let h = phi.codomain();
    let mut edges = Vec::with_capacity(g.num_edges());
    let mut base = Vec::with_capacity(p.num_blocks());
    let mut induced_edges = Vec::with_capacity(g.num_edges());
    for (b, block) in p.blocks().iter().enumerate() {
        let rep = block[0];
        base.push(edges.len());
        for &e in g.out_edges(rep) {
            edges.push((g.edge_id(e).to_string(), b, p.block_of(g.target(e))));
            induced_edges.push(phi.map_edge(e));
        }
    }
    let q = Arc::new(MultiGraph::new(block_state_ids(g, p), edges)?);
    let mut q_edges = vec![0; g.num_edges()];
    for e in g.edges() {
        let b = p.block_of(g.source(e));
        let rep_edge = phi.lift_edge(p.blocks()[b][0], phi.map_edge(e)).expect("same fiber");
        let k = g.out_position(rep_edge);
        if q.target(base[b] + k) != p.block_of(g.target(e)) {
            return Err(Error::Verification(format!("quotient edge for `{}` has inconsistent target", g.edge_id(e))));
        }
        q_edges[e] = base[b] + k;
    }
    let quotient_map = RightResolver::new(GraphHom::new(g.clone(), q.clone(), q_edges, p.labels().to_vec())?)?;
    let induced_states = p.blocks().iter().map(|b| phi.map_state(b[0])).collect();
    let induced = RightResolver::new(GraphHom::new(q.clone(), h.clone(), induced_edges, induced_states)?)?;
    Ok(Quotient { graph: q, quotient_map, induced })
}
