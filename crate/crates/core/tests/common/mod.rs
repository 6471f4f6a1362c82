//! Brute-force oracles shared by the integration tests. Nothing here calls
//! the library algorithm under test; each oracle follows a definition.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rrgraph::corpus::{self, CorpusGraph};
use rrgraph::graph::{EdgeIx, StateIx};
use rrgraph::hom::{match_by_position, EdgeOrders, GraphHom, Partition, RightResolver};
use rrgraph::MultiGraph;

pub fn arc(counts: &[Vec<usize>]) -> Arc<MultiGraph> {
    Arc::new(MultiGraph::from_counts(counts).unwrap())
}

/// Named graphs, every strongly connected graph with ≤ 3 states and
/// out-degree ≤ 3, with 4 states and out-degree ≤ 2, and seeded random
/// graphs on 5 to 8 states.
pub fn general_corpus() -> Vec<CorpusGraph> {
    let mut out = corpus::named();
    for (n, d) in [(1, 3), (2, 3), (3, 3), (4, 2)] {
        for (k, c) in corpus::all_graphs(n, d).into_iter().enumerate() {
            out.push(CorpusGraph::from_counts(format!("all{n}d{d}#{k}"), &c));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for n in 5..=8 {
        for k in 0..12 {
            let g = corpus::random_strongly_connected(n, 3, &mut rng);
            out.push(CorpusGraph { name: format!("rand{n}#{k}"), graph: Arc::new(g) });
        }
    }
    out
}

/// Stability from the definition: `x ∼ y` iff every pair reachable from
/// `(x, y)` by common words can still reach the diagonal. Each pair gets its
/// own forward search; nothing is shared with the backward pass of the
/// library.
pub fn stability_oracle(phi: &RightResolver) -> Partition {
    let g = phi.domain();
    let h = phi.codomain();
    let n = g.num_states();
    let step_pair = |(x, y): (StateIx, StateIx)| -> Vec<(StateIx, StateIx)> {
        h.out_edges(phi.map_state(x)).iter().map(|&a| (phi.step(x, a).unwrap(), phi.step(y, a).unwrap())).collect()
    };
    let reachable = |start: (StateIx, StateIx)| -> Vec<(StateIx, StateIx)> {
        let mut seen = HashSet::from([start]);
        let mut queue = VecDeque::from([start]);
        let mut order = vec![start];
        while let Some(p) = queue.pop_front() {
            for q in step_pair(p) {
                if seen.insert(q) {
                    order.push(q);
                    queue.push_back(q);
                }
            }
        }
        order
    };
    let mut mergeable = vec![None; n * n];
    let mut can_merge = |p: (StateIx, StateIx)| -> bool {
        *mergeable[p.0 * n + p.1].get_or_insert_with(|| reachable(p).iter().any(|&(a, b)| a == b))
    };
    let labels: Vec<usize> = g
        .states()
        .map(|x| {
            g.states()
                .find(|&y| phi.map_state(x) == phi.map_state(y) && reachable((x, y)).into_iter().all(&mut can_merge))
                .unwrap()
        })
        .collect();
    Partition::from_labels(&labels)
}

/// Same blocks, regardless of label order.
pub fn same_partition(a: &Partition, b: &Partition) -> bool {
    a.refines(b) && b.refines(a)
}

/// Synchronizing in the sense of the definition: stability classes are
/// whole fibers.
pub fn synchronizing_oracle(phi: &RightResolver) -> bool {
    same_partition(&stability_oracle(phi), &Partition::from_fibers(phi.hom()))
}

/// Subset construction on a deterministic labelling: can the whole state
/// set be driven to a singleton?
pub fn subset_synchronizes(g: &MultiGraph, labels: &[usize], alphabet: usize) -> bool {
    let step = |set: &BTreeSet<StateIx>, letter: usize| -> BTreeSet<StateIx> {
        set.iter()
            .map(|&s| g.target(*g.out_edges(s).iter().find(|&&e| labels[e] == letter).unwrap()))
            .collect()
    };
    let start: BTreeSet<StateIx> = g.states().collect();
    let mut seen = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    while let Some(set) = queue.pop_front() {
        if set.len() == 1 {
            return true;
        }
        for letter in 0..alphabet {
            let next = step(&set, letter);
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    false
}

/// A right-resolver with state map `tau` exists iff `tau` is onto and every
/// state sends as many edges into each fiber as its image has to that state.
pub fn resolver_with_state_map(g: &Arc<MultiGraph>, h: &Arc<MultiGraph>, tau: &[StateIx]) -> Option<RightResolver> {
    if h.states().any(|j| !tau.contains(&j)) {
        return None;
    }
    for s in g.states() {
        for j in h.states() {
            let into = g.out_edges(s).iter().filter(|&&e| tau[g.target(e)] == j).count();
            if into != h.edge_count(tau[s], j) {
                return None;
            }
        }
    }
    let edge_map = match_by_position(g, h, tau, &EdgeOrders::default()).ok()?;
    Some(RightResolver::new(GraphHom::new(g.clone(), h.clone(), edge_map, tau.to_vec()).ok()?).unwrap())
}

/// Every state map `V(G) → V(H)` admitting a right-resolver.
pub fn resolver_state_maps(g: &Arc<MultiGraph>, h: &Arc<MultiGraph>) -> Vec<Vec<StateIx>> {
    let (n, m) = (g.num_states(), h.num_states());
    let mut out = Vec::new();
    let mut tau = vec![0; n];
    loop {
        if resolver_with_state_map(g, h, &tau).is_some() {
            out.push(tau.clone());
        }
        let mut i = 0;
        while i < n {
            tau[i] += 1;
            if tau[i] < m {
                break;
            }
            tau[i] = 0;
            i += 1;
        }
        if i == n {
            return out;
        }
    }
}

/// All set partitions of `0..n` as label vectors in restricted growth form.
pub fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(i: usize, labels: &mut Vec<usize>, max: usize, out: &mut Vec<Vec<usize>>) {
        if i == labels.len() {
            out.push(labels.clone());
            return;
        }
        for l in 0..=max {
            labels[i] = l;
            go(i + 1, labels, max.max(l + 1), out);
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        go(1, &mut vec![0; n], 1, &mut out);
    }
    out
}

/// Partitions whose blocks agree on edge counts into every block; exactly
/// the fiber partitions of right-resolvers out of `g`.
pub fn out_equitable_partitions(g: &MultiGraph) -> Vec<Partition> {
    set_partitions(g.num_states())
        .into_iter()
        .filter(|labels| {
            let k = labels.iter().max().unwrap() + 1;
            let sig = |s: StateIx| {
                let mut v = vec![0; k];
                for &e in g.out_edges(s) {
                    v[labels[g.target(e)]] += 1;
                }
                v
            };
            g.states().all(|s| g.states().all(|t| labels[s] != labels[t] || sig(s) == sig(t)))
        })
        .map(|labels| Partition::from_labels(&labels))
        .collect()
}

/// Per-state bunchiness straight from the definition, with the minimal
/// factor's state map supplied: the followers of `I` hit distinct fibers,
/// as many as `Σ(I)` has followers.
pub fn bunchy_by_definition(g: &MultiGraph, sigma: &[StateIx], m: &MultiGraph) -> bool {
    g.states().all(|s| {
        let f = g.followers(s);
        let images: BTreeSet<StateIx> = f.iter().map(|&t| sigma[t]).collect();
        images.len() == f.len() && f.len() == m.followers(sigma[s]).len()
    })
}

/// Words of length `len` over the out-edges of `start`, as paths in `h`.
pub fn words(h: &MultiGraph, start: StateIx, len: usize) -> Vec<Vec<EdgeIx>> {
    let mut out = vec![(start, Vec::new())];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|(s, w)| {
                h.out_edges(s).iter().map(move |&a| {
                    let mut w = w.clone();
                    w.push(a);
                    (h.target(a), w)
                })
            })
            .collect();
    }
    out.into_iter().map(|(_, w)| w).collect()
}

/// Every choice of one out-edge per state, keeping one edge per distinct
/// target since parallel choices give the same functional graph.
pub fn zero_edge_choices(g: &MultiGraph) -> Vec<Vec<EdgeIx>> {
    let options: Vec<Vec<EdgeIx>> = g
        .states()
        .map(|s| {
            let mut seen = HashSet::new();
            g.out_edges(s).iter().copied().filter(|&e| seen.insert(g.target(e))).collect()
        })
        .collect();
    let mut out = vec![Vec::new()];
    for opts in &options {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<EdgeIx>| {
                opts.iter().map(move |&e| {
                    let mut v = prefix.clone();
                    v.push(e);
                    v
                })
            })
            .collect();
    }
    out
}

/// Unique tallest tree of the functional graph `s ↦ t(zero[s])`, by orbit
/// simulation. Heights are tail lengths, roots the first cycle state hit;
/// some fiber of `sigma` must have its maximal height attained under a
/// single root.
pub fn unique_tallest_tree_oracle(g: &MultiGraph, sigma: &[StateIx], zero: &[EdgeIx]) -> bool {
    let f = |s: StateIx| g.target(zero[s]);
    let (height, root): (Vec<usize>, Vec<StateIx>) = g
        .states()
        .map(|s| {
            let mut path = vec![s];
            loop {
                let next = f(*path.last().unwrap());
                if let Some(t) = path.iter().position(|&x| x == next) {
                    return (t, path[t]);
                }
                path.push(next);
            }
        })
        .unzip();
    let fibers = sigma.iter().max().map_or(0, |&m| m + 1);
    (0..fibers).any(|k| {
        let members: Vec<StateIx> = g.states().filter(|&s| sigma[s] == k).collect();
        let h_max = members.iter().map(|&s| height[s]).max().unwrap();
        let roots: BTreeSet<StateIx> = members.iter().filter(|&&s| height[s] == h_max).map(|&s| root[s]).collect();
        roots.len() == 1
    })
}
