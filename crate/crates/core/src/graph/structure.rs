use std::collections::HashMap;

use super::{EdgeIx, MultiGraph, StateIx, StateSetFamily};
use crate::error::{Error, Result};

/// Strong components via an iterative Tarjan pass.
///
/// Each component is sorted, and components are ordered by their smallest
/// state, so the result does not depend on traversal order.
pub fn strong_components(g: &MultiGraph) -> StateSetFamily {
    let succ = g.successor_lists();
    StateSetFamily { sets: tarjan(&succ) }
}

pub(crate) fn tarjan(succ: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut comps = tarjan_postorder(succ);
    comps.sort_by_key(|c| c[0]);
    comps
}

/// Components in emission order: every component comes after all components
/// reachable from it.
pub(crate) fn tarjan_postorder(succ: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = succ.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comps = Vec::new();
    let mut next = 0;
    // (vertex, next child position)
    let mut call: Vec<(usize, usize)> = Vec::new();
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        call.push((root, 0));
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            if let Some(&w) = succ[v].get(*pos) {
                *pos += 1;
                if index[w] == usize::MAX {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack underflow");
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    comps.push(comp);
                }
            }
        }
    }
    comps
}

pub fn is_strongly_connected(g: &MultiGraph) -> bool {
    g.num_states() > 0 && strong_components(g).len() == 1 && g.num_edges() > 0
}

/// The condensation DAG. State `C{i}` stands for `strong_components(g).sets[i]`;
/// one edge per ordered pair of components joined by at least one edge.
pub fn condensation(g: &MultiGraph) -> MultiGraph {
    let comps = strong_components(g);
    let member = comps.membership(g.num_states());
    let mut pairs: Vec<(usize, usize)> = g
        .edges()
        .filter_map(|e| {
            let a = member[g.source(e)].expect("covered");
            let b = member[g.target(e)].expect("covered");
            (a != b).then_some((a, b))
        })
        .collect();
    pairs.sort_unstable();
    pairs.dedup();
    let states = (0..comps.len()).map(|i| format!("C{i}")).collect();
    let edges = pairs.into_iter().map(|(a, b)| (format!("C{a}->C{b}"), a, b)).collect();
    MultiGraph::new(states, edges).expect("condensation ids are unique")
}

/// Strong components with no edge leaving them (the condensation sinks).
pub fn principal_components(g: &MultiGraph) -> StateSetFamily {
    let comps = strong_components(g);
    let member = comps.membership(g.num_states());
    let mut terminal = vec![true; comps.len()];
    for e in g.edges() {
        let a = member[g.source(e)].expect("covered");
        if a != member[g.target(e)].expect("covered") {
            terminal[a] = false;
        }
    }
    StateSetFamily {
        sets: comps.sets.into_iter().zip(terminal).filter_map(|(c, t)| t.then_some(c)).collect(),
    }
}

/// The subgraph on a follower-closed state set, keeping every outgoing edge.
///
/// States and edges keep their ids and relative order.
pub fn induced_principal_subgraph(g: &MultiGraph, states: &[StateIx]) -> Result<MultiGraph> {
    let mut keep = vec![false; g.num_states()];
    for &s in states {
        keep[s] = true;
    }
    let mut new_index = vec![usize::MAX; g.num_states()];
    let mut ids = Vec::new();
    for s in g.states().filter(|&s| keep[s]) {
        new_index[s] = ids.len();
        ids.push(g.state_id(s).to_string());
    }
    let mut edges = Vec::new();
    for e in g.edges() {
        let (s, t) = (g.source(e), g.target(e));
        if !keep[s] {
            continue;
        }
        if !keep[t] {
            return Err(Error::NotFollowerClosed(g.state_id(s).to_string()));
        }
        edges.push((g.edge_id(e).to_string(), new_index[s], new_index[t]));
    }
    MultiGraph::new(ids, edges)
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Period of a strongly connected graph: the gcd of the BFS level
/// differences `level(s) + 1 - level(t)` over all edges.
pub fn period(g: &MultiGraph) -> Result<usize> {
    if !is_strongly_connected(g) {
        return Err(Error::NotStronglyConnected);
    }
    let n = g.num_states();
    let mut level = vec![usize::MAX; n];
    level[0] = 0;
    let mut queue = std::collections::VecDeque::from([0]);
    while let Some(s) = queue.pop_front() {
        for &e in g.out_edges(s) {
            let t = g.target(e);
            if level[t] == usize::MAX {
                level[t] = level[s] + 1;
                queue.push_back(t);
            }
        }
    }
    let mut p = 0;
    for e in g.edges() {
        let (a, b) = (level[g.source(e)] as i64 + 1, level[g.target(e)] as i64);
        p = gcd(p, (a - b).unsigned_abs() as usize);
    }
    Ok(p)
}

/// The k-th higher edge graph: states are paths of length k-1, edges are
/// paths of length k. Path ids join edge ids with `.`.
pub fn higher_edge_graph(g: &MultiGraph, k: usize) -> Result<MultiGraph> {
    if k == 0 {
        return Err(Error::Precondition("higher edge graph needs k >= 1".into()));
    }
    g.require_sink_free()?;
    if k == 1 {
        return Ok(g.clone());
    }
    // Paths of length k-1 in lexicographic order of edge indices.
    let mut paths: Vec<Vec<EdgeIx>> = g.edges().map(|e| vec![e]).collect();
    for _ in 1..k - 1 {
        paths = paths
            .into_iter()
            .flat_map(|p| {
                let last = *p.last().expect("non-empty path");
                g.out_edges(g.target(last)).iter().map(move |&e| {
                    let mut q = p.clone();
                    q.push(e);
                    q
                })
            })
            .collect();
    }
    let join = |p: &[EdgeIx]| p.iter().map(|&e| g.edge_id(e)).collect::<Vec<_>>().join(".");
    let index: HashMap<Vec<EdgeIx>, usize> = paths.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
    let states: Vec<String> = paths.iter().map(|p| join(p)).collect();
    let mut edges = Vec::new();
    for (i, p) in paths.iter().enumerate() {
        let last = *p.last().expect("non-empty path");
        for &e in g.out_edges(g.target(last)) {
            let mut full = p.clone();
            full.push(e);
            let tail = index[&full[1..]];
            edges.push((join(&full), i, tail));
        }
    }
    MultiGraph::new(states, edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> MultiGraph {
        let counts: Vec<Vec<usize>> =
            (0..n).map(|i| (0..n).map(|j| usize::from(j == (i + 1) % n)).collect()).collect();
        MultiGraph::from_counts(&counts).unwrap()
    }

    fn loops(d: usize) -> MultiGraph {
        MultiGraph::from_counts(&[vec![d]]).unwrap()
    }

    #[test]
    fn components_of_cycle_and_bridge() {
        assert_eq!(strong_components(&cycle(3)).sets, vec![vec![0, 1, 2]]);
        let bridge = MultiGraph::from_counts(&[vec![1, 1], vec![0, 1]]).unwrap();
        assert_eq!(strong_components(&bridge).sets, vec![vec![0], vec![1]]);
        assert_eq!(strong_components(&loops(2)).sets, vec![vec![0]]);
    }

    #[test]
    fn condensation_shapes() {
        let c = condensation(&cycle(4));
        assert_eq!((c.num_states(), c.num_edges()), (1, 0));
        let bridge = MultiGraph::from_counts(&[vec![1, 2], vec![0, 1]]).unwrap();
        let c = condensation(&bridge);
        assert_eq!((c.num_states(), c.num_edges()), (2, 1));
        let chain = MultiGraph::from_counts(&[vec![1, 1, 0], vec![0, 1, 1], vec![0, 0, 1]]).unwrap();
        let c = condensation(&chain);
        assert_eq!(c.num_edges(), 2);
        assert_eq!(c.edge_count(0, 1) + c.edge_count(1, 2), 2);
    }

    #[test]
    fn principal_components_are_terminal() {
        assert_eq!(principal_components(&cycle(3)).sets, vec![vec![0, 1, 2]]);
        let chain = MultiGraph::from_counts(&[vec![1, 1, 0], vec![0, 1, 1], vec![0, 0, 1]]).unwrap();
        assert_eq!(principal_components(&chain).sets, vec![vec![2]]);
        let fork = MultiGraph::from_counts(&[vec![0, 1, 1], vec![0, 1, 0], vec![0, 0, 1]]).unwrap();
        assert_eq!(principal_components(&fork).sets, vec![vec![1], vec![2]]);
    }

    #[test]
    fn induced_principal_subgraph_checks_closure() {
        let chain = MultiGraph::from_counts(&[vec![1, 1, 0], vec![0, 1, 1], vec![0, 0, 1]]).unwrap();
        let sub = induced_principal_subgraph(&chain, &[2]).unwrap();
        assert_eq!((sub.num_states(), sub.num_edges()), (1, 1));
        let all = induced_principal_subgraph(&chain, &[0, 1, 2]).unwrap();
        assert_eq!(all, chain);
        assert!(matches!(induced_principal_subgraph(&chain, &[1]), Err(Error::NotFollowerClosed(_))));
    }

    #[test]
    fn periods() {
        assert_eq!(period(&cycle(3)).unwrap(), 3);
        assert_eq!(period(&loops(2)).unwrap(), 1);
        let o22 = MultiGraph::from_counts(&[vec![0, 2], vec![2, 0]]).unwrap();
        assert_eq!(period(&o22).unwrap(), 2);
        let bridge = MultiGraph::from_counts(&[vec![1, 1], vec![0, 1]]).unwrap();
        assert!(matches!(period(&bridge), Err(Error::NotStronglyConnected)));
    }

    #[test]
    fn higher_edge_graphs() {
        let g = loops(2);
        assert_eq!(higher_edge_graph(&g, 1).unwrap(), g);
        let h = higher_edge_graph(&g, 2).unwrap();
        assert_eq!((h.num_states(), h.num_edges()), (2, 4));
        assert!(h.states().all(|s| h.out_degree(s) == 2));
        let c = higher_edge_graph(&cycle(3), 2).unwrap();
        assert_eq!((c.num_states(), c.num_edges()), (3, 3));
        assert_eq!(period(&c).unwrap(), 3);
        assert!(higher_edge_graph(&g, 0).is_err());
    }
}
