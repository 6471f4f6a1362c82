use std::collections::{HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::graph::{tarjan_postorder, EdgeIx, StateIx};
use crate::hom::RightResolver;

/// Upper bound on subset-graph nodes explored by [`minimal_images_bruteforce`].
pub const IMAGE_NODE_CAP: usize = 1 << 16;

/// `image = fiber(base_state) · word`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageSet {
    pub base_state: StateIx,
    pub word: Vec<EdgeIx>,
    pub image: Vec<StateIx>,
}

/// Subset construction from the fiber over `i`. Returns every reachable
/// image whose size can never drop again, with a shortest witness word, in
/// BFS order.
pub fn minimal_images_bruteforce(phi: &RightResolver, i: StateIx, size_guard: usize) -> Result<Vec<ImageSet>> {
    let h = phi.codomain();
    let fiber = phi.fiber(i);
    if fiber.len() > size_guard {
        return Err(Error::SizeGuard { limit: size_guard, actual: fiber.len() });
    }
    // Nodes are (codomain state, sorted subset); the codomain state is
    // implied by any member, so the subset alone is the key.
    let mut ids: HashMap<Vec<StateIx>, usize> = HashMap::new();
    let mut nodes: Vec<Vec<StateIx>> = vec![fiber.clone()];
    let mut parent: Vec<Option<(usize, EdgeIx)>> = vec![None];
    let mut succ: Vec<Vec<usize>> = vec![Vec::new()];
    ids.insert(fiber, 0);
    let mut queue = VecDeque::from([0]);
    while let Some(u) = queue.pop_front() {
        let base = phi.map_state(nodes[u][0]);
        for &a in h.out_edges(base) {
            let mut next: Vec<StateIx> = nodes[u].iter().map(|&s| phi.step(s, a).expect("fiber")).collect();
            next.sort_unstable();
            next.dedup();
            let v = match ids.get(&next) {
                Some(&v) => v,
                None => {
                    if nodes.len() >= IMAGE_NODE_CAP {
                        return Err(Error::SizeGuard { limit: IMAGE_NODE_CAP, actual: nodes.len() + 1 });
                    }
                    let v = nodes.len();
                    ids.insert(next.clone(), v);
                    nodes.push(next);
                    parent.push(Some((u, a)));
                    succ.push(Vec::new());
                    queue.push_back(v);
                    v
                }
            };
            succ[u].push(v);
        }
    }
    // Smallest size reachable from each node, component by component in
    // reverse topological order.
    let mut floor = vec![usize::MAX; nodes.len()];
    for comp in tarjan_postorder(&succ) {
        let mut m = usize::MAX;
        for &u in &comp {
            m = m.min(nodes[u].len());
            for &v in &succ[u] {
                m = m.min(floor[v]);
            }
        }
        for &u in &comp {
            floor[u] = m;
        }
    }
    let mut out = Vec::new();
    for u in 0..nodes.len() {
        if floor[u] == nodes[u].len() {
            let mut word = Vec::new();
            let mut cur = u;
            while let Some((prev, a)) = parent[cur] {
                word.push(a);
                cur = prev;
            }
            word.reverse();
            out.push(ImageSet { base_state: i, word, image: nodes[u].clone() });
        }
    }
    Ok(out)
}
