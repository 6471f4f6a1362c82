use std::collections::VecDeque;
use std::sync::Arc;

use super::{classify, require_almost_bunchy};
use crate::error::{Error, Result};
use crate::graph::{is_strongly_connected, MultiGraph};
use crate::hom::{construct_right_resolver, minimal_factor, quotient, Partition, RightResolver};
use crate::stability::{is_synchronizing, stability_relation, StabilityRelation};

/// B(G) with the quotient map G → B(G) and the induced map B(G) → M(G).
#[derive(Debug, Clone)]
pub struct BunchyFactor {
    pub graph: Arc<MultiGraph>,
    pub partition: Partition,
    pub quotient_map: RightResolver,
    pub to_minimal: RightResolver,
}

/// Pairs of Σ_G-fiber-mates reachable from the diagonal in the
/// pair graph form ≈₀; its transitive closure ≈ is a congruence for any
/// positional-matching resolver, and B(G) = G/≈.
pub fn max_bunchy_factor(g: &Arc<MultiGraph>) -> Result<BunchyFactor> {
    let mf = minimal_factor(g)?;
    let sigma = &mf.sigma;
    let n = g.num_states();
    let followers: Vec<Vec<usize>> = g.states().map(|s| g.followers(s)).collect();
    let mut seen = vec![false; n * n];
    let mut queue: VecDeque<(usize, usize)> = g.states().map(|s| (s, s)).collect();
    for s in g.states() {
        seen[s * n + s] = true;
    }
    let mut uf = UnionFind::new(n);
    while let Some((a, b)) = queue.pop_front() {
        uf.union(a, b);
        for &x in &followers[a] {
            for &y in &followers[b] {
                if sigma[x] == sigma[y] && !seen[x * n + y] {
                    seen[x * n + y] = true;
                    queue.push_back((x, y));
                }
            }
        }
    }
    let labels: Vec<usize> = g.states().map(|s| uf.find(s)).collect();
    let partition = Partition::from_labels(&labels);
    let phi = construct_right_resolver(g, &mf, None)?;
    let q = quotient(&partition, &phi)?;
    if !classify(&q.graph)?.bunchy {
        return Err(Error::Verification("G/≈ is not bunchy".into()));
    }
    Ok(BunchyFactor { graph: q.graph, partition, quotient_map: q.quotient_map, to_minimal: q.induced })
}

/// ∼_G: stability of the positional-matching resolver onto M(G).
pub fn stability_of_almost_bunchy(g: &Arc<MultiGraph>) -> Result<StabilityRelation> {
    require_almost_bunchy(g)?;
    let mf = minimal_factor(g)?;
    stability_relation(&construct_right_resolver(g, &mf, None)?)
}

/// O(G) = G/∼_G for almost bunchy G.
#[derive(Debug, Clone)]
pub struct OgFactor {
    pub graph: Arc<MultiGraph>,
    pub relation: StabilityRelation,
    pub synchronizer: RightResolver,
    /// Whether O(G) is bunchy. Guaranteed (and enforced) for strongly
    /// connected input; only reported otherwise.
    pub bunchy: bool,
}

pub fn og_almost_bunchy(g: &Arc<MultiGraph>) -> Result<OgFactor> {
    require_almost_bunchy(g)?;
    let mf = minimal_factor(g)?;
    let phi = construct_right_resolver(g, &mf, None)?;
    let relation = stability_relation(&phi)?;
    let q = quotient(&relation.partition, &phi)?;
    if !is_synchronizing(&q.quotient_map)? {
        return Err(Error::Verification("quotient by the stability relation is not synchronizing".into()));
    }
    let bunchy = classify(&q.graph)?.bunchy;
    if !bunchy && is_strongly_connected(g) {
        return Err(Error::Verification("O(G) of a strongly connected graph is not bunchy".into()));
    }
    Ok(OgFactor { graph: q.graph, relation, synchronizer: q.quotient_map, bunchy })
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            cur = std::mem::replace(&mut self.parent[cur], root);
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        // Smaller index becomes the root, which keeps labels deterministic.
        if ra < rb {
            self.parent[rb] = ra;
        } else {
            self.parent[ra] = rb;
        }
    }
}
