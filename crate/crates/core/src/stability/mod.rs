//! Transition maps, stability relations and synchronization.
//!
//! Everything here runs on the pair graph of a right-resolver: pairs of
//! fiber-mates `(x, y)` with one edge per codomain letter. This is the
//! fiber product of Φ with itself at the index level.

mod images;
mod product;

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::graph::{EdgeIx, StateIx};
use crate::hom::{Partition, RightResolver};

pub use images::{minimal_images_bruteforce, ImageSet, IMAGE_NODE_CAP};
pub use product::{common_sync_extension, fiber_product, FiberProduct, SyncExtension};

/// `s · u`.
pub fn transition(phi: &RightResolver, s: StateIx, word: &[EdgeIx]) -> Result<StateIx> {
    phi.transition(s, word)
}

/// Ordered pairs of fiber-mates with their one-letter transitions.
pub(crate) struct PairGraph {
    n: usize,
    index: Vec<usize>,
    pub pairs: Vec<(StateIx, StateIx)>,
    /// `(codomain letter, successor pair)` per pair.
    pub succ: Vec<Vec<(EdgeIx, usize)>>,
}

impl PairGraph {
    pub fn new(phi: &RightResolver) -> Self {
        let g = phi.domain();
        let h = phi.codomain();
        let n = g.num_states();
        let fibers = phi.fibers();
        let mut index = vec![usize::MAX; n * n];
        let mut pairs = Vec::new();
        for x in g.states() {
            for &y in &fibers.sets[phi.map_state(x)] {
                index[x * n + y] = pairs.len();
                pairs.push((x, y));
            }
        }
        let succ = pairs
            .iter()
            .map(|&(x, y)| {
                h.out_edges(phi.map_state(x))
                    .iter()
                    .map(|&a| {
                        let (x2, y2) = (phi.step(x, a).expect("fiber"), phi.step(y, a).expect("fiber"));
                        (a, index[x2 * n + y2])
                    })
                    .collect()
            })
            .collect();
        Self { n, index, pairs, succ }
    }

    pub fn id(&self, x: StateIx, y: StateIx) -> Option<usize> {
        let i = self.index[x * self.n + y];
        (i != usize::MAX).then_some(i)
    }

    pub fn is_diagonal(&self, p: usize) -> bool {
        self.pairs[p].0 == self.pairs[p].1
    }

    /// Pairs with a path into `targets`.
    pub fn reaches(&self, targets: &[bool]) -> Vec<bool> {
        let mut pred = vec![Vec::new(); self.pairs.len()];
        for (p, out) in self.succ.iter().enumerate() {
            for &(_, q) in out {
                pred[q].push(p);
            }
        }
        let mut seen = targets.to_vec();
        let mut queue: VecDeque<usize> = (0..seen.len()).filter(|&p| seen[p]).collect();
        while let Some(q) = queue.pop_front() {
            for &p in &pred[q] {
                if !seen[p] {
                    seen[p] = true;
                    queue.push_back(p);
                }
            }
        }
        seen
    }

    /// A shortest word taking pair `p` to the diagonal.
    pub fn merging_word(&self, p: usize) -> Option<Vec<EdgeIx>> {
        let mut parent: Vec<Option<(usize, EdgeIx)>> = vec![None; self.pairs.len()];
        let mut seen = vec![false; self.pairs.len()];
        seen[p] = true;
        let mut queue = VecDeque::from([p]);
        while let Some(q) = queue.pop_front() {
            if self.is_diagonal(q) {
                let mut word = Vec::new();
                let mut cur = q;
                while let Some((prev, a)) = parent[cur] {
                    word.push(a);
                    cur = prev;
                }
                word.reverse();
                return Some(word);
            }
            for &(a, r) in &self.succ[q] {
                if !seen[r] {
                    seen[r] = true;
                    parent[r] = Some((q, a));
                    queue.push_back(r);
                }
            }
        }
        None
    }
}

/// ∼_Φ as a partition refining the ∂Φ-fibers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilityRelation {
    pub partition: Partition,
    pub fibers: Partition,
}

impl StabilityRelation {
    pub fn stable(&self, a: StateIx, b: StateIx) -> bool {
        self.partition.same_block(a, b)
    }

    /// Only the diagonal.
    pub fn is_trivial(&self) -> bool {
        self.partition.is_diagonal()
    }

    /// Classes equal fibers.
    pub fn is_total_on_fibers(&self) -> bool {
        self.partition.num_blocks() == self.fibers.num_blocks()
    }
}

/// Backward search. U is the set of pairs with no path to the diagonal; the
/// stable pairs are those with no path to U. Transitivity is checked rather
/// than assumed.
pub fn stability_relation(phi: &RightResolver) -> Result<StabilityRelation> {
    let pg = PairGraph::new(phi);
    let diagonal: Vec<bool> = (0..pg.pairs.len()).map(|p| pg.is_diagonal(p)).collect();
    let unmergeable: Vec<bool> = pg.reaches(&diagonal).into_iter().map(|r| !r).collect();
    let unstable = pg.reaches(&unmergeable);
    relation_from_pairs(phi, &pg, &unstable)
}

fn relation_from_pairs(phi: &RightResolver, pg: &PairGraph, unstable: &[bool]) -> Result<StabilityRelation> {
    let g = phi.domain();
    let n = g.num_states();
    let class: Vec<Vec<StateIx>> = g
        .states()
        .map(|x| g.states().filter(|&y| pg.id(x, y).is_some_and(|p| !unstable[p])).collect())
        .collect();
    for x in g.states() {
        if let Some(&y) = class[x].iter().find(|&&y| class[y] != class[x]) {
            return Err(Error::NotTransitive(format!("classes of `{}` and `{}` differ", g.state_id(x), g.state_id(y))));
        }
    }
    let labels: Vec<StateIx> = (0..n).map(|x| class[x][0]).collect();
    Ok(StabilityRelation { partition: Partition::from_labels(&labels), fibers: Partition::from_fibers(phi) })
}

pub fn is_synchronizing(phi: &RightResolver) -> Result<bool> {
    Ok(stability_relation(phi)?.is_total_on_fibers())
}

/// A word `u` starting at codomain state `i` with `|fiber(i) · u| = 1`.
///
/// Greedy: merge the two smallest states of the current image by a shortest
/// merging word, and repeat.
pub fn synchronizing_word(phi: &RightResolver, i: StateIx) -> Result<Vec<EdgeIx>> {
    if !is_synchronizing(phi)? {
        return Err(Error::NotSynchronizing);
    }
    let pg = PairGraph::new(phi);
    let mut current = phi.fiber(i);
    let mut word = Vec::new();
    while current.len() > 1 {
        let p = pg.id(current[0], current[1]).expect("fiber-mates");
        let u = pg.merging_word(p).ok_or_else(|| {
            Error::Verification("stable pair has no merging word".into())
        })?;
        current = current.iter().map(|&s| phi.transition(s, &u)).collect::<Result<Vec<_>>>()?;
        current.sort_unstable();
        current.dedup();
        word.extend(u);
    }
    Ok(word)
}
